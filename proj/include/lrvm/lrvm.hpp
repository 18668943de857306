/*
 * Copyright 2026 the lrvm authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef LRVM_LRVM_HPP_
#define LRVM_LRVM_HPP_

#include "lrvm/classifiers.hpp"
#include "lrvm/commands.hpp"
#include "lrvm/common.hpp"
#include "lrvm/dataset.hpp"
#include "lrvm/eval.hpp"
#include "lrvm/kernel.hpp"
#include "lrvm/knn.hpp"
#include "lrvm/local.hpp"
#include "lrvm/ranking.hpp"
#include "lrvm/rvm.hpp"

#endif  // LRVM_LRVM_HPP_
