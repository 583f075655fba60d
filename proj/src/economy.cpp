#include "sxp/economy.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace sxp {

namespace {

constexpr double kEarthRadiusM = 6371008.8;
constexpr double kDegToRad = 0.017453292519943295;

void check_sorted_single_entity(const std::vector<SensorSample>& samples) {
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].entity_id != samples[0].entity_id)
            throw std::invalid_argument("economy operations take one entity's stream");
        if (samples[i].at < samples[i - 1].at)
            throw std::invalid_argument("samples not time-sorted");
    }
}

}  // namespace

void CollectionRhythm::validate() const {
    if (active_s <= 0 || inactive_s <= 0 || min_fetch_gap_ms <= 0 ||
        sustain_interval_s <= 0 || min_move_m <= 0)
        throw std::invalid_argument("rhythm values must be positive");
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlam = (lon2 - lon1) * kDegToRad;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

std::vector<SensorSample> economy_filter(const std::vector<SensorSample>& samples,
                                         const CollectionRhythm& rhythm) {
    rhythm.validate();
    check_sorted_single_entity(samples);
    const std::int64_t sustain_ms = static_cast<std::int64_t>(rhythm.sustain_interval_s * 1000.0);

    std::vector<SensorSample> out;
    std::optional<SensorSample> last_loc, last_act;  // last retained, per kind
    for (const auto& s : samples) {
        auto& last = s.kind == SampleKind::Location ? last_loc : last_act;
        bool drop = false;
        if (last) {
            const bool within_time = s.at - last->at < sustain_ms;
            if (s.kind == SampleKind::Location) {
                const double moved = haversine_m(last->lat, last->lon, s.lat, s.lon);
                drop = moved < rhythm.min_move_m && within_time;
            } else {
                drop = within_time;
            }
        }
        if (!drop) {
            out.push_back(s);
            last = s;
        }
    }
    return out;
}

std::vector<SensorSample> reconstruct(const std::vector<SensorSample>& retained,
                                      const CollectionRhythm& rhythm, Instant horizon) {
    rhythm.validate();
    check_sorted_single_entity(retained);
    for (const auto& s : retained)
        if (s.synthetic)
            throw std::invalid_argument("reconstruct input already contains synthetic samples");
    if (!retained.empty() && horizon < retained.back().at)
        throw std::invalid_argument("horizon precedes last retained sample");
    const std::int64_t sustain_ms = static_cast<std::int64_t>(rhythm.sustain_interval_s * 1000.0);

    std::vector<SensorSample> out;
    // Per kind, walk gaps between consecutive retained samples.
    for (int kind_i = 0; kind_i < 2; ++kind_i) {
        const SampleKind kind = kind_i == 0 ? SampleKind::Location : SampleKind::Activity;
        const SensorSample* prev = nullptr;
        for (const auto& s : retained) {
            if (s.kind != kind) continue;
            if (prev != nullptr) {
                for (Instant t = prev->at + sustain_ms; t < s.at; t += sustain_ms) {
                    SensorSample synth = *prev;
                    synth.at = t;
                    synth.synthetic = true;
                    out.push_back(synth);
                }
            }
            out.push_back(s);
            prev = &s;
        }
        if (prev != nullptr) {
            for (Instant t = prev->at + sustain_ms; t <= horizon; t += sustain_ms) {
                SensorSample synth = *prev;
                synth.at = t;
                synth.synthetic = true;
                out.push_back(synth);
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SensorSample& a, const SensorSample& b) { return a.at < b.at; });
    return out;
}

void check_rhythm_matches(const ReconstructionProvenance& provenance,
                          const CollectionRhythm& rhythm) {
    if (provenance.sustain_interval_s != rhythm.sustain_interval_s ||
        provenance.min_move_m != rhythm.min_move_m)
        throw std::runtime_error(
            "reconstruction rhythm differs from the one used at collection time");
}

bool roundtrip_check(const std::vector<SensorSample>& original,
                     const CollectionRhythm& rhythm) {
    rhythm.validate();
    check_sorted_single_entity(original);
    if (original.empty()) return true;

    const auto retained = economy_filter(original, rhythm);
    const auto rebuilt = reconstruct(retained, rhythm, original.back().at);

    // Compare the rebuilt stream against last-observation-carried-forward
    // over the original, kind by kind.
    for (int kind_i = 0; kind_i < 2; ++kind_i) {
        const SampleKind kind = kind_i == 0 ? SampleKind::Location : SampleKind::Activity;
        std::vector<const SensorSample*> orig;
        for (const auto& s : original)
            if (s.kind == kind) orig.push_back(&s);
        std::size_t cursor = 0;
        for (const auto& r : rebuilt) {
            if (r.kind != kind) continue;
            while (cursor + 1 < orig.size() && orig[cursor + 1]->at <= r.at) ++cursor;
            if (orig.empty() || orig[cursor]->at > r.at) return false;  // nothing observed yet
            if (kind == SampleKind::Location) {
                const double err = haversine_m(orig[cursor]->lat, orig[cursor]->lon, r.lat, r.lon);
                if (err > rhythm.min_move_m) return false;
            }
        }
    }
    return true;
}

}  // namespace sxp
