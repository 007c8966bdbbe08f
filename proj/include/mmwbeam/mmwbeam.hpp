#pragma once

#include "mmwbeam/units.hpp"
#include "mmwbeam/error.hpp"
#include "mmwbeam/antenna.hpp"
#include "mmwbeam/link_budget.hpp"
#include "mmwbeam/rng.hpp"
#include "mmwbeam/optimizer.hpp"
#include "mmwbeam/capstats.hpp"
#include "mmwbeam/adaptation.hpp"
#include "mmwbeam/config.hpp"
#include "mmwbeam/io.hpp"
#include "mmwbeam/commands.hpp"
