#pragma once

#include "lenslab/errors.hpp"
#include "lenslab/geometry.hpp"
#include "lenslab/graphs.hpp"
#include "lenslab/io.hpp"
#include "lenslab/nonlocal.hpp"
#include "lenslab/numerics.hpp"
#include "lenslab/partitions.hpp"
#include "lenslab/perturb.hpp"
#include "lenslab/riesz.hpp"
#include "lenslab/run.hpp"
#include "lenslab/stability.hpp"
