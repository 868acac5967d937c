// Umbrella header: the whole library in include order.
#pragma once

#include <aenet/rng.hpp>
#include <aenet/message.hpp>
#include <aenet/multigraph.hpp>
#include <aenet/random_regular.hpp>
#include <aenet/spectral.hpp>
#include <aenet/replacement.hpp>
#include <aenet/matching.hpp>
#include <aenet/adversary.hpp>
#include <aenet/engine.hpp>
#include <aenet/flooding.hpp>
#include <aenet/all_pairs.hpp>
#include <aenet/compose.hpp>
#include <aenet/erased.hpp>
#include <aenet/analysis.hpp>
