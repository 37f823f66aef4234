#pragma once

#include "qnn/error.hpp"
#include "qnn/grover.hpp"
#include "qnn/matrix.hpp"
#include "qnn/network.hpp"
#include "qnn/polyfit.hpp"
#include "qnn/qgje.hpp"
#include "qnn/qsim.hpp"
#include "qnn/rng.hpp"
#include "qnn/stats.hpp"
