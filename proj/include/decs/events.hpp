// events.hpp -- event identities, controllability attributes, sorted event sets
#ifndef DECS_EVENTS_HPP
#define DECS_EVENTS_HPP

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace decs {

using EventId = int;
using StateId = int;

struct EventInfo {
    std::string name;
    bool controllable = false;
    int owner = 0;  // 1-based agent index, 0 = unowned
};

// One registry per model universe. Event names are unique; an event keeps the
// same controllability everywhere it appears.
class EventRegistry {
public:
    EventId intern(const std::string& name, bool controllable, int owner = 0) {
        auto it = by_name_.find(name);
        if (it != by_name_.end()) {
            EventInfo& e = events_[it->second];
            if (e.controllable != controllable)
                throw std::invalid_argument("event '" + name + "' redeclared with conflicting controllability");
            if (owner != 0) {
                if (e.owner != 0 && e.owner != owner)
                    throw std::invalid_argument("event '" + name + "' redeclared with conflicting owner");
                e.owner = owner;
            }
            return it->second;
        }
        EventId id = static_cast<EventId>(events_.size());
        events_.push_back(EventInfo{name, controllable, owner});
        by_name_.emplace(name, id);
        return id;
    }

    EventId find(const std::string& name) const {
        auto it = by_name_.find(name);
        return it == by_name_.end() ? -1 : it->second;
    }

    const EventInfo& info(EventId e) const { return events_.at(static_cast<size_t>(e)); }
    const std::string& name(EventId e) const { return info(e).name; }
    bool controllable(EventId e) const { return info(e).controllable; }
    int owner(EventId e) const { return info(e).owner; }
    size_t size() const { return events_.size(); }

private:
    std::vector<EventInfo> events_;
    std::unordered_map<std::string, EventId> by_name_;
};

using RegistryPtr = std::shared_ptr<EventRegistry>;

// Sorted unique vector of event ids.
class EventSet {
public:
    EventSet() = default;
    explicit EventSet(std::vector<EventId> v) : ids_(std::move(v)) {
        std::sort(ids_.begin(), ids_.end());
        ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    }

    bool contains(EventId e) const {
        return std::binary_search(ids_.begin(), ids_.end(), e);
    }
    void insert(EventId e) {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), e);
        if (it == ids_.end() || *it != e) ids_.insert(it, e);
    }
    void erase(EventId e) {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), e);
        if (it != ids_.end() && *it == e) ids_.erase(it);
    }

    size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    auto begin() const { return ids_.begin(); }
    auto end() const { return ids_.end(); }
    const std::vector<EventId>& ids() const { return ids_; }

    bool operator==(const EventSet& o) const { return ids_ == o.ids_; }
    bool operator!=(const EventSet& o) const { return ids_ != o.ids_; }

    bool is_subset_of(const EventSet& o) const {
        return std::includes(o.ids_.begin(), o.ids_.end(), ids_.begin(), ids_.end());
    }

    friend EventSet unite(const EventSet& a, const EventSet& b) {
        std::vector<EventId> out;
        std::set_union(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(), std::back_inserter(out));
        return EventSet(std::move(out));
    }
    friend EventSet intersect(const EventSet& a, const EventSet& b) {
        std::vector<EventId> out;
        std::set_intersection(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(), std::back_inserter(out));
        return EventSet(std::move(out));
    }
    friend EventSet subtract(const EventSet& a, const EventSet& b) {
        std::vector<EventId> out;
        std::set_difference(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(), std::back_inserter(out));
        return EventSet(std::move(out));
    }

private:
    std::vector<EventId> ids_;
};

// Event names in lexicographic order, e.g. for diagnostics and file output.
std::vector<std::string> sorted_names(const EventRegistry& reg, const EventSet& set);

}  // namespace decs

#endif
