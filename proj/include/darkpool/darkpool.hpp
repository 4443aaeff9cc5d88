// Copyright 2026 The Darkpool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Umbrella header.

#pragma once

#include "darkpool/baselines.hpp"
#include "darkpool/comparator.hpp"
#include "darkpool/core.hpp"
#include "darkpool/exp3int.hpp"
#include "darkpool/expgrad.hpp"
#include "darkpool/harness.hpp"
#include "darkpool/output.hpp"
#include "darkpool/rounding.hpp"
#include "darkpool/scenario_io.hpp"
#include "darkpool/simulator.hpp"
#include "darkpool/zbpl.hpp"
