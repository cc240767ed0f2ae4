#ifndef SEASON_SEASON_HPP
#define SEASON_SEASON_HPP

#include "season/common.hpp"
#include "season/random.hpp"
#include "season/generator.hpp"
#include "season/discrete.hpp"
#include "season/gaussian_mixture.hpp"
#include "season/ou.hpp"
#include "season/mlp.hpp"
#include "season/discriminator.hpp"
#include "season/refine.hpp"
#include "season/sampler.hpp"
#include "season/metrics.hpp"
#include "season/oracle.hpp"
#include "season/io.hpp"
#include "season/experiments.hpp"

#endif  // SEASON_SEASON_HPP
