#include "decs/events.hpp"

namespace decs {

std::vector<std::string> sorted_names(const EventRegistry& reg, const EventSet& set) {
    std::vector<std::string> out;
    out.reserve(set.size());
    for (EventId e : set) out.push_back(reg.name(e));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace decs
