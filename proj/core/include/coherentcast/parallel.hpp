#pragma once

#include <cstddef>
#include <functional>

namespace coherentcast {

/**
 * @brief Runs body(i) for i in [0, count) on up to `workers` threads.
 *
 * Indices are handed out in contiguous blocks, so a body that writes only to
 * slot i gives the same result for any worker count. The first exception
 * thrown by any body is rethrown after all threads finish.
 */
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace coherentcast
