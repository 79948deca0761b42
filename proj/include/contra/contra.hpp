// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "contra/literal.hpp"
#include "contra/diagnostic.hpp"
#include "contra/trace_model.hpp"
#include "contra/parser.hpp"
#include "contra/reward.hpp"
#include "contra/grpo.hpp"
#include "contra/render.hpp"
#include "contra/dbs.hpp"
#include "contra/mock_policy.hpp"
#include "contra/fixtures.hpp"
