#include "sdelab/errors.hpp"

namespace sdelab {

void require(bool condition, const std::string& message)
{
    if (!condition) throw UsageError(message);
}

}  // namespace sdelab
