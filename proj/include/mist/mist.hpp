#pragma once

#include "mist/datagen.hpp"
#include "mist/errors.hpp"
#include "mist/io.hpp"
#include "mist/matrix.hpp"
#include "mist/problem.hpp"
#include "mist/selection.hpp"
#include "mist/serialize.hpp"
#include "mist/solvers.hpp"
#include "mist/spectral.hpp"
#include "mist/thresholding.hpp"
