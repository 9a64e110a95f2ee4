#include "cumident/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <limits>
#include <vector>

#include <omp.h>

namespace cumident {

int worker_count()
{
    if (const char* env = std::getenv("CUMIDENT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<int>(v);
    }
    return omp_get_max_threads();
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
    if (count == 0)
        return;
    std::vector<std::exception_ptr> errors(count);
    const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace cumident
