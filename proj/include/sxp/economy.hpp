#pragma once

// Collection-economy filtering and its inverse reconstruction. The device
// keeps a sample only when it moved enough or enough time passed; the
// server side fills the gaps back in at the exact same cadence, so the
// learning pipeline sees a stream that is bias-free at sustain-interval
// resolution.

#include <vector>

#include "sxp/types.hpp"

namespace sxp {

struct CollectionRhythm {
    double active_s = 2.0;
    double inactive_s = 8.0;
    double min_fetch_gap_ms = 100.0;
    double sustain_interval_s = 900.0;  // value sustained this long is re-emitted
    double min_move_m = 10.0;           // movement below this is discarded

    double duty_cycle() const { return active_s / (active_s + inactive_s); }
    void validate() const;  // throws std::invalid_argument on nonsense values
};

// Great-circle distance in meters (spherical Earth, R = 6371008.8 m).
double haversine_m(double lat1, double lon1, double lat2, double lon2);

// Drops a location sample iff it moved less than min_move_m from the last
// retained sample AND arrived less than sustain_interval_s after it.
// Activity samples use the time threshold only. The first sample of the
// stream is always retained. Input must be a single entity's time-sorted
// stream; throws std::invalid_argument otherwise.
std::vector<SensorSample> economy_filter(const std::vector<SensorSample>& samples,
                                         const CollectionRhythm& rhythm);

// Emits a synthetic copy of the last retained sample at every multiple of
// sustain_interval_s between it and the next retained sample (or the
// horizon). Synthetic samples carry the `synthetic` flag. `retained` must
// be an economy_filter output and `horizon` at or after its last timestamp.
std::vector<SensorSample> reconstruct(const std::vector<SensorSample>& retained,
                                      const CollectionRhythm& rhythm, Instant horizon);

// True iff reconstruct(economy_filter(original)) agrees with the original
// stream resampled at sustain-interval resolution: at every reconstructed
// timestamp, the last original observation is within min_move_m of the
// reconstructed position (and kinds match).
bool roundtrip_check(const std::vector<SensorSample>& original,
                     const CollectionRhythm& rhythm);

// Rhythm values a filtered stream was produced with, carried in the
// output header so reconstruction cannot silently run with different
// thresholds than collection did.
struct ReconstructionProvenance {
    double sustain_interval_s = 0.0;
    double min_move_m = 0.0;
};

// Throws std::runtime_error if the provenance disagrees with the rhythm.
void check_rhythm_matches(const ReconstructionProvenance& provenance,
                          const CollectionRhythm& rhythm);

}  // namespace sxp
