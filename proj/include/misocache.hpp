/*
 * Copyright 2026 The misocache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "misocache/analysis.hpp"
#include "misocache/audit.hpp"
#include "misocache/bits.hpp"
#include "misocache/harmonic.hpp"
#include "misocache/library.hpp"
#include "misocache/params.hpp"
#include "misocache/parallel.hpp"
#include "misocache/rational.hpp"
#include "misocache/scheme.hpp"
#include "misocache/simulator.hpp"
#include "misocache/serialize.hpp"
#include "misocache/sweep.hpp"
