// Copyright 2026 The linvar Authors
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

#include "linvar/classify.hpp"
#include "linvar/derivation.hpp"
#include "linvar/derive.hpp"
#include "linvar/error.hpp"
#include "linvar/flatsat.hpp"
#include "linvar/io.hpp"
#include "linvar/models.hpp"
#include "linvar/presets.hpp"
#include "linvar/project.hpp"
#include "linvar/rewrite.hpp"
#include "linvar/term.hpp"
#include "linvar/theory.hpp"
#include "linvar/union_find.hpp"
#include "linvar/validate.hpp"
