#include "dgb/parallel.hpp"

#include <cstdlib>
#include <string>

namespace dgb {

namespace {
Exec g_exec = [] {
    const char* env = std::getenv("DGB_THREADS");
    if (env != nullptr && std::string(env) != "0" && std::string(env) != "1")
        return Exec::OpenMP;
    return Exec::Serial;
}();
}

Exec default_exec() { return g_exec; }
void set_default_exec(Exec e) { g_exec = e; }

} // namespace dgb
