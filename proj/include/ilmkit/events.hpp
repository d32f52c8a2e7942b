#ifndef ILMKIT_EVENTS_HPP
#define ILMKIT_EVENTS_HPP

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ilmkit/errors.hpp"

namespace ilm {

enum class Framework { SI, SIR, SEIR };

inline std::string framework_name(Framework f) {
    switch (f) {
        case Framework::SI: return "SI";
        case Framework::SIR: return "SIR";
        default: return "SEIR";
    }
}

enum class Compartment { Susceptible, Exposed, Infectious, Removed };

// Event times are discrete: an event recorded at time t happened within the
// continuous interval [t, t+1), so all membership tests are integer
// comparisons against the recorded times.
struct IndividualEvents {
    std::optional<int> exposure;
    std::optional<int> infectious;
    std::optional<int> removal;

    bool ever_infected() const { return exposure.has_value() || infectious.has_value(); }
};

struct EventHistory {
    Framework framework = Framework::SI;
    std::vector<IndividualEvents> events;  // indexed by individual id
    int horizon = 0;                       // times lie in [0, horizon]

    std::size_t size() const { return events.size(); }

    // Time the individual leaves the susceptible class: exposure under SEIR,
    // infection otherwise. +inf sentinel when never infected.
    int entry_time(std::size_t i) const {
        const auto& e = events[i];
        if (framework == Framework::SEIR) {
            if (e.exposure) return *e.exposure;
        } else if (e.infectious) {
            return *e.infectious;
        }
        return never;
    }

    Compartment state(std::size_t i, int t) const {
        const auto& e = events[i];
        if (framework == Framework::SEIR) {
            const int texp = e.exposure ? *e.exposure : never;
            if (t < texp) return Compartment::Susceptible;
            const int tinf = e.infectious ? *e.infectious : never;
            if (t < tinf) return Compartment::Exposed;
            const int trem = e.removal ? *e.removal : never;
            return t < trem ? Compartment::Infectious : Compartment::Removed;
        }
        const int tinf = e.infectious ? *e.infectious : never;
        if (t < tinf) return Compartment::Susceptible;
        if (framework == Framework::SIR) {
            const int trem = e.removal ? *e.removal : never;
            if (t >= trem) return Compartment::Removed;
        }
        return Compartment::Infectious;
    }

    bool susceptible(std::size_t i, int t) const { return t < entry_time(i); }

    bool infectious_at(std::size_t i, int t) const {
        const auto& e = events[i];
        if (!e.infectious || t < *e.infectious) return false;
        if (framework == Framework::SI) return true;
        const int trem = e.removal ? *e.removal : never;
        return t < trem;
    }

    std::vector<std::size_t> infectious_set(int t) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < events.size(); ++i)
            if (infectious_at(i, t)) out.push_back(i);
        return out;
    }

    static constexpr int never = std::numeric_limits<int>::max();
};

struct CompartmentSets {
    std::vector<std::size_t> susceptible, exposed, infectious, removed;
};

inline void validate_history(const EventHistory& h) {
    for (std::size_t i = 0; i < h.events.size(); ++i) {
        const auto& e = h.events[i];
        for (const auto& t : {e.exposure, e.infectious, e.removal})
            if (t && (*t < 0 || *t > h.horizon))
                throw input_error("event time out of [0, horizon] for id " + std::to_string(i));
        if (e.exposure && e.infectious && *e.exposure > *e.infectious)
            throw input_error("exposure after infectious time for id " + std::to_string(i));
        if (e.infectious && e.removal && *e.infectious > *e.removal)
            throw input_error("infectious after removal time for id " + std::to_string(i));
        if (h.framework == Framework::SEIR && e.infectious && !e.exposure)
            throw input_error("SEIR history needs an exposure time for infected id " + std::to_string(i));
    }
}

// The partition S(t), E(t), I(t), R(t) of all ids at time t.
inline CompartmentSets compartment_sets(const EventHistory& h, int t) {
    if (t < 0 || t > h.horizon) throw input_error("time out of [0, horizon]");
    CompartmentSets s;
    for (std::size_t i = 0; i < h.events.size(); ++i) {
        switch (h.state(i, t)) {
            case Compartment::Susceptible: s.susceptible.push_back(i); break;
            case Compartment::Exposed: s.exposed.push_back(i); break;
            case Compartment::Infectious: s.infectious.push_back(i); break;
            case Compartment::Removed: s.removed.push_back(i); break;
        }
    }
    return s;
}

// Restricts a history to the fitting window: events after t_max are cleared
// (nothing after the horizon is modelled), events at or before t_min are kept
// as known history so states at t_min condition the fit. The likelihood takes
// the same (t_min, t_max) pair to select which transitions it scores.
inline EventHistory temporal_subset(const EventHistory& h, int t_min, int t_max) {
    if (!(0 <= t_min && t_min < t_max && t_max <= h.horizon))
        throw input_error("temporal window must satisfy 0 <= t_min < t_max <= horizon");
    EventHistory out;
    out.framework = h.framework;
    out.horizon = t_max;
    out.events.resize(h.events.size());
    for (std::size_t i = 0; i < h.events.size(); ++i) {
        const auto& e = h.events[i];
        auto keep = [t_max](const std::optional<int>& t) -> std::optional<int> {
            return (t && *t <= t_max) ? t : std::nullopt;
        };
        out.events[i] = IndividualEvents{keep(e.exposure), keep(e.infectious), keep(e.removal)};
    }
    return out;
}

}  // namespace ilm

#endif
