/* Copyright 2026 The XSepConv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef XSEPCONV_PARALLEL_HPP_
#define XSEPCONV_PARALLEL_HPP_

namespace xsepconv::parallel {

// Thin wrappers over the OpenMP runtime; degrade to 1 thread without it.
int max_threads();
void set_num_threads(int n);

// Restores the previous thread count on scope exit.
class ThreadScope {
 public:
  explicit ThreadScope(int n) : previous_(max_threads()) { set_num_threads(n); }
  ~ThreadScope() { set_num_threads(previous_); }
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

 private:
  int previous_;
};

}  // namespace xsepconv::parallel

#endif  // XSEPCONV_PARALLEL_HPP_
