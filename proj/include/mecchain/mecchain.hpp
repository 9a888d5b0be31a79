#pragma once

#include "mecchain/graph.hpp"
#include "mecchain/cpdag.hpp"
#include "mecchain/extension.hpp"
#include "mecchain/operators.hpp"
#include "mecchain/catalog.hpp"
#include "mecchain/oracle.hpp"
#include "mecchain/rng.hpp"
#include "mecchain/mcmc.hpp"
#include "mecchain/stats.hpp"
#include "mecchain/io.hpp"
