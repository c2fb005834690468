// Copyright 2026 The qthermo Authors
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

#pragma once

#include "qthermo/channels.hpp"
#include "qthermo/draws.hpp"
#include "qthermo/fisher.hpp"
#include "qthermo/linalg.hpp"
#include "qthermo/optimizer.hpp"
#include "qthermo/parallel.hpp"
#include "qthermo/random.hpp"
#include "qthermo/results_io.hpp"
#include "qthermo/scenarios.hpp"
#include "qthermo/states.hpp"
#include "qthermo/sweep.hpp"
#include "qthermo/unitaries.hpp"
#include "qthermo/verify.hpp"
