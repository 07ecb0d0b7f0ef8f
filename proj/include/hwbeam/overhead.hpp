#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hwbeam {

/// Protocol timing constants and codebook sizes that convert event counts
/// into alignment overhead. Periodicities are restricted to the values the
/// standard allows.
struct OverheadConfig {
    int codebook_bs = 48;      // beams swept at the site
    int codebook_vu = 12;      // beams swept at the vehicle
    double tau_ss = 5.0;       // synchronization burst duration, ms
    double tau_sym = 0.125;    // OFDM symbol duration, ms
    double speed = 30.0;       // m/s
    int t_ss_period = 20;      // ms
    int t_csi_period = 20;     // slots
    int slot_symbols = 14;     // symbols per slot (converts slots to ms)
    bool ssb_fractional = false;  // bill fractional bursts instead of whole ones

    static constexpr std::array<int, 6> allowed_ss_periods{5, 10, 20, 40, 80, 160};
    static constexpr std::array<int, 8> allowed_csi_periods{5, 10, 20, 40, 80, 160, 320, 640};

    double slot_ms() const { return slot_symbols * tau_sym; }

    void validate() const {
        if (codebook_bs < 1 || codebook_vu < 1)
            throw std::invalid_argument("OverheadConfig: codebook sizes must be >= 1");
        if (!(tau_ss > 0.0) || !(tau_sym > 0.0))
            throw std::invalid_argument("OverheadConfig: durations must be > 0");
        if (!(speed > 0.0)) throw std::invalid_argument("OverheadConfig: speed must be > 0");
        if (slot_symbols < 1) throw std::invalid_argument("OverheadConfig: slot_symbols must be >= 1");
        bool ok = false;
        for (int v : allowed_ss_periods) ok = ok || v == t_ss_period;
        if (!ok) throw std::invalid_argument("OverheadConfig: t_ss_period must be one of {5,10,20,40,80,160} ms");
        ok = false;
        for (int v : allowed_csi_periods) ok = ok || v == t_csi_period;
        if (!ok) throw std::invalid_argument("OverheadConfig: t_csi_period must be one of {5,...,640} slots");
    }
};

/// Sweep time after one handover: the full initial-access sweep over both
/// codebooks, billed in whole synchronization bursts of 64 blocks each
/// (a fractional-burst mode is available for sensitivity checks).
inline double t_handover(double n_handovers, const OverheadConfig& cfg) {
    if (!(n_handovers >= 0.0)) throw std::invalid_argument("t_handover: count must be >= 0");
    const double blocks = static_cast<double>(cfg.codebook_bs) * cfg.codebook_vu;
    const double bursts = cfg.ssb_fractional ? blocks / 64.0 : std::ceil(blocks / 64.0);
    return n_handovers * bursts * cfg.tau_ss;
}

/// Re-alignment time after one beam switch: one symbol per beam pair.
inline double t_beamswitch(double n_switches, const OverheadConfig& cfg) {
    if (!(n_switches >= 0.0)) throw std::invalid_argument("t_beamswitch: count must be >= 0");
    return n_switches * static_cast<double>(cfg.codebook_bs) * cfg.codebook_vu * cfg.tau_sym;
}

class TcrSaturation : public std::runtime_error {
  public:
    explicit TcrSaturation(double overhead_ms, double travel_ms)
        : std::runtime_error("beam alignment overhead meets or exceeds travel time; the link never stabilizes"),
          overhead_ms(overhead_ms),
          travel_ms(travel_ms) {}
    double overhead_ms;
    double travel_ms;
};

/// Training-to-connectivity ratio: alignment time over the remaining
/// connectivity time for the trip of length l_h at the configured speed.
inline double tcr(double n_handovers, double n_switches, double l_h, const OverheadConfig& cfg) {
    cfg.validate();
    const double overhead = t_handover(n_handovers, cfg) + t_beamswitch(n_switches, cfg);
    const double travel_ms = l_h / cfg.speed * 1000.0;
    if (overhead >= travel_ms) throw TcrSaturation(overhead, travel_ms);
    return overhead / (travel_ms - overhead);
}

struct OverheadReport {
    double t_ho_ms = 0.0;
    double t_bswitch_ms = 0.0;
    double tcr = 0.0;
    double switch_share = 0.0;  // fraction of overhead due to beam switching
};

inline OverheadReport overhead_report(double n_handovers, double n_switches, double l_h,
                                      const OverheadConfig& cfg) {
    OverheadReport r;
    r.t_ho_ms = t_handover(n_handovers, cfg);
    r.t_bswitch_ms = t_beamswitch(n_switches, cfg);
    r.tcr = tcr(n_handovers, n_switches, l_h, cfg);
    const double total = r.t_ho_ms + r.t_bswitch_ms;
    r.switch_share = total > 0.0 ? r.t_bswitch_ms / total : 0.0;
    return r;
}

struct CsiFeasibility {
    std::vector<int> periods_slots;  // allowed periodicities tracking this mobility
    bool none_feasible = false;
};

/// Allowed channel-report periodicities whose duration stays strictly below
/// the mean beam sojourn time; an empty result means no standard-compliant
/// period can track this mobility.
inline CsiFeasibility feasible_csi_periods(double mean_sojourn_ms, const OverheadConfig& cfg) {
    if (!(mean_sojourn_ms > 0.0))
        throw std::invalid_argument("feasible_csi_periods: mean sojourn must be > 0");
    CsiFeasibility out;
    for (int slots : OverheadConfig::allowed_csi_periods)
        if (slots * cfg.slot_ms() < mean_sojourn_ms) out.periods_slots.push_back(slots);
    out.none_feasible = out.periods_slots.empty();
    return out;
}

}  // namespace hwbeam
