#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wkam {

/// Caps every worker pool in the library; 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

/// Runs body(begin, end) over [0, n) in chunks. Runs serially inside a
/// worker started by run_tasks, or when n is below `grain`.
void parallel_for(std::size_t n, std::size_t grain, const std::function<void(std::size_t, std::size_t)>& body);

/// Runs independent tasks on at most max_threads() threads. Exceptions are
/// rethrown in task order after all tasks finish.
void run_tasks(const std::vector<std::function<void()>>& tasks);

}  // namespace wkam
