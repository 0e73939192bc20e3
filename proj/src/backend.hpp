/* Copyright 2026 the kprio authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef KPRIO_BACKEND_HPP
#define KPRIO_BACKEND_HPP

#include <cstddef>
#include <optional>

#include "task.hpp"

namespace kprio {

// Shared-queue contract. push/pop are called only by the owning place's
// worker (owner-only), but different places call concurrently. pop may
// fail spuriously; it never returns a task twice.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual void push(PlaceId place, std::uint32_t k, const Task& t) = 0;
  virtual std::optional<Task> pop(PlaceId place) = 0;

  virtual const char* name() const = 0;
  virtual PlaceId places() const = 0;

  // Steal / spy / probe attempts, summed over places.
  virtual std::uint64_t steals_or_spies() const = 0;

  // Live entries in the place's local priority queue (diagnostics/tests).
  virtual std::size_t queue_depth(PlaceId place) const = 0;
};

enum class BackendKind { ws, central, hybrid };

}  // namespace kprio

#endif
