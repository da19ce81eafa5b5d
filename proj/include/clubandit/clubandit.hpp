#pragma once

#include <clubandit/algorithms.hpp>
#include <clubandit/bounds.hpp>
#include <clubandit/clustered.hpp>
#include <clubandit/clustering.hpp>
#include <clubandit/core.hpp>
#include <clubandit/env.hpp>
#include <clubandit/experiment.hpp>
#include <clubandit/policies.hpp>
#include <clubandit/rng.hpp>
