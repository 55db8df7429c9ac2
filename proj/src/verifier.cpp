#include "ghz/verifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace ghz::verify {

class StateAccess {
  public:
    static PureState make(int qubits, std::vector<Amplitude> amp) {
        return PureState(qubits, std::move(amp));
    }
    static std::vector<Amplitude>& raw(PureState& s) { return s.amp_; }
};

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kZeroProbability = 1e-15;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_qubit(const PureState& s, int q) {
    if (q < 0 || q >= s.qubit_count()) throw std::invalid_argument("qubit index out of range");
}

void check_distinct(const PureState& s, std::span<const int> qubits) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        check_qubit(s, qubits[i]);
        for (std::size_t j = 0; j < i; ++j)
            if (qubits[i] == qubits[j]) throw std::invalid_argument("qubit indices must be distinct");
    }
}

int relabel(int qubit, std::span<const int> removed) {
    int shift = 0;
    for (int r : removed) {
        if (r == qubit) throw std::invalid_argument("correction target is a measured qubit");
        if (r < qubit) ++shift;
    }
    return qubit - shift;
}

PureState apply_correction(PureState state, const PauliCorrection& c) {
    if (c.x) state = apply_gate(std::move(state), Gate::x(c.qubit));
    if (c.z) state = apply_gate(std::move(state), Gate::z(c.qubit));
    return state;
}

MeasurementOutcome pick(std::vector<MeasurementOutcome> branches, RandomStream& rng) {
    double u = uniform01(rng);
    for (auto& b : branches) {
        if (u < b.probability) return std::move(b);
        u -= b.probability;
    }
    return std::move(branches.back());
}

}  // namespace

PureState::PureState(int qubits) : qubits_(qubits) {
    if (qubits < 0 || qubits > kMaxQubits) throw std::invalid_argument("qubit count out of range");
    amp_.assign(std::size_t{1} << qubits, Amplitude{0.0, 0.0});
    amp_[0] = 1.0;
}

PureState PureState::basis(int qubits, std::uint64_t index) {
    PureState s(qubits);
    if (index >= s.amp_.size()) throw std::invalid_argument("basis index out of range");
    s.amp_[0] = 0.0;
    s.amp_[index] = 1.0;
    return s;
}

PureState PureState::from_amplitudes(std::vector<Amplitude> amplitudes) {
    const std::size_t size = amplitudes.size();
    if (size == 0 || !std::has_single_bit(size)) throw std::invalid_argument("length must be a power of two");
    const int qubits = std::countr_zero(size);
    if (qubits > kMaxQubits) throw std::invalid_argument("too many qubits");
    PureState s(qubits, std::move(amplitudes));
    if (std::abs(s.norm_squared() - 1.0) > kNormTolerance) throw std::invalid_argument("state is not normalized");
    return s;
}

PureState PureState::bell_pair() { return ghz(2); }

PureState PureState::ghz(int qubits) {
    if (qubits < 1) throw std::invalid_argument("GHZ state needs at least one qubit");
    PureState s(qubits);
    s.amp_[0] = kInvSqrt2;
    s.amp_.back() = kInvSqrt2;
    return s;
}

PureState PureState::tensor(const PureState& rhs) const {
    const int total = qubits_ + rhs.qubits_;
    if (total > kMaxQubits) throw std::invalid_argument("tensor product exceeds qubit limit");
    std::vector<Amplitude> amp(std::size_t{1} << total);
    for (std::size_t hi = 0; hi < rhs.amp_.size(); ++hi)
        for (std::size_t lo = 0; lo < amp_.size(); ++lo)
            amp[(hi << qubits_) | lo] = rhs.amp_[hi] * amp_[lo];
    return PureState(total, std::move(amp));
}

double PureState::norm_squared() const {
    double sum = 0.0;
    for (const auto& a : amp_) sum += std::norm(a);
    return sum;
}

PureState apply_gate(PureState state, const Gate& gate) {
    check_qubit(state, gate.target);
    auto& amp = StateAccess::raw(state);
    const std::size_t tbit = std::size_t{1} << gate.target;
    switch (gate.kind) {
        case GateKind::H:
            for (std::size_t i = 0; i < amp.size(); ++i) {
                if (i & tbit) continue;
                auto a0 = amp[i], a1 = amp[i | tbit];
                amp[i] = (a0 + a1) * kInvSqrt2;
                amp[i | tbit] = (a0 - a1) * kInvSqrt2;
            }
            break;
        case GateKind::X:
            for (std::size_t i = 0; i < amp.size(); ++i)
                if (!(i & tbit)) std::swap(amp[i], amp[i | tbit]);
            break;
        case GateKind::Z:
            for (std::size_t i = 0; i < amp.size(); ++i)
                if (i & tbit) amp[i] = -amp[i];
            break;
        case GateKind::CNOT: {
            check_qubit(state, gate.control);
            if (gate.control == gate.target) throw std::invalid_argument("CNOT control equals target");
            const std::size_t cbit = std::size_t{1} << gate.control;
            for (std::size_t i = 0; i < amp.size(); ++i)
                if ((i & cbit) && !(i & tbit)) std::swap(amp[i], amp[i | tbit]);
            break;
        }
    }
    return state;
}

std::vector<MeasurementOutcome> measure_branches(const PureState& state, std::span<const int> qubits) {
    check_distinct(state, qubits);
    const int n = state.qubit_count();
    const int k = static_cast<int>(qubits.size());
    std::vector<int> rest;
    for (int q = 0; q < n; ++q)
        if (std::find(qubits.begin(), qubits.end(), q) == qubits.end()) rest.push_back(q);

    std::vector<MeasurementOutcome> out;
    const auto amp = state.amplitudes();
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << k); ++pattern) {
        std::uint64_t fixed = 0;
        for (int i = 0; i < k; ++i)
            if (pattern >> i & 1) fixed |= std::uint64_t{1} << qubits[static_cast<std::size_t>(i)];

        std::vector<Amplitude> post(std::size_t{1} << rest.size());
        double prob = 0.0;
        for (std::uint64_t r = 0; r < post.size(); ++r) {
            std::uint64_t full = fixed;
            for (std::size_t j = 0; j < rest.size(); ++j)
                if (r >> j & 1) full |= std::uint64_t{1} << rest[j];
            post[r] = amp[full];
            prob += std::norm(post[r]);
        }
        if (prob <= kZeroProbability) continue;
        const double scale = 1.0 / std::sqrt(prob);
        for (auto& a : post) a *= scale;

        MeasurementOutcome outcome;
        for (int i = 0; i < k; ++i) outcome.bits.push_back(static_cast<int>(pattern >> i & 1));
        outcome.probability = prob;
        outcome.post_state = StateAccess::make(static_cast<int>(rest.size()), std::move(post));
        out.push_back(std::move(outcome));
    }
    return out;
}

std::vector<MeasurementOutcome> ghz_fuse_branches(const PureState& state, std::span<const int> centers,
                                                  std::span<const int> partners) {
    if (centers.size() < 2) throw std::invalid_argument("fusion needs at least two centre qubits");
    if (!partners.empty() && partners.size() != centers.size())
        throw std::invalid_argument("one partner per centre qubit");
    check_distinct(state, centers);

    PureState work = state;
    for (std::size_t i = 1; i < centers.size(); ++i) work = apply_gate(std::move(work), Gate::cnot(centers[0], centers[i]));
    work = apply_gate(std::move(work), Gate::h(centers[0]));

    auto branches = measure_branches(work, centers);
    if (partners.empty()) return branches;
    for (auto& b : branches) {
        for (std::size_t i = 0; i < centers.size(); ++i) {
            PauliCorrection c{relabel(partners[i], centers), i > 0 && b.bits[i] == 1, i == 0 && b.bits[0] == 1};
            if (!c.x && !c.z) continue;
            b.post_state = apply_correction(std::move(b.post_state), c);
            b.corrections.push_back(c);
        }
    }
    return branches;
}

MeasurementOutcome ghz_fuse(const PureState& state, std::span<const int> centers, RandomStream& rng,
                            std::span<const int> partners) {
    return pick(ghz_fuse_branches(state, centers, partners), rng);
}

std::vector<MeasurementOutcome> bell_swap_branches(const PureState& state, int a, int b,
                                                   std::optional<int> partner) {
    const int centers[] = {a, b};
    auto branches = ghz_fuse_branches(state, centers);
    if (!partner) return branches;
    const int target = relabel(*partner, centers);
    for (auto& br : branches) {
        PauliCorrection c{target, br.bits[1] == 1, br.bits[0] == 1};
        if (!c.x && !c.z) continue;
        br.post_state = apply_correction(std::move(br.post_state), c);
        br.corrections.push_back(c);
    }
    return branches;
}

MeasurementOutcome bell_swap(const PureState& state, int a, int b, RandomStream& rng,
                             std::optional<int> partner) {
    return pick(bell_swap_branches(state, a, b, partner), rng);
}

std::vector<MeasurementOutcome> fanout_ghz_branches(const PureState& state, int holder_b, int holder_c,
                                                    std::optional<int> partner_b) {
    check_qubit(state, holder_b);
    check_qubit(state, holder_c);
    if (holder_b == holder_c) throw std::invalid_argument("fan-out needs two distinct holder qubits");

    PureState work = apply_gate(state, Gate::cnot(holder_c, holder_b));
    const int measured[] = {holder_b};
    auto branches = measure_branches(work, measured);
    if (!partner_b) return branches;
    const int target = relabel(*partner_b, measured);
    for (auto& br : branches) {
        if (br.bits[0] == 0) continue;
        PauliCorrection c{target, true, false};
        br.post_state = apply_correction(std::move(br.post_state), c);
        br.corrections.push_back(c);
    }
    return branches;
}

MeasurementOutcome fanout_ghz(const PureState& state, int holder_b, int holder_c, RandomStream& rng,
                              std::optional<int> partner_b) {
    return pick(fanout_ghz_branches(state, holder_b, holder_c, partner_b), rng);
}

namespace {

// <GHZ| rho |GHZ> after X on the parties in `flip` and a relative sign.
double projected_weight(const PureState& state, std::span<const int> parties, std::uint64_t flip, double sign) {
    const int n = state.qubit_count();
    std::uint64_t party_mask = 0;
    std::uint64_t flip_mask = 0;
    for (std::size_t i = 0; i < parties.size(); ++i) {
        party_mask |= std::uint64_t{1} << parties[i];
        if (flip >> i & 1) flip_mask |= std::uint64_t{1} << parties[i];
    }
    const auto amp = state.amplitudes();
    double total = 0.0;
    for (std::uint64_t e = 0; e < (std::uint64_t{1} << n); ++e) {
        if (e & party_mask) continue;
        const auto lo = amp[e | flip_mask];
        const auto hi = amp[e | (party_mask & ~flip_mask)];
        total += std::norm(lo + sign * hi) / 2.0;
    }
    return total;
}

}  // namespace

double ghz_fidelity(const PureState& state, std::span<const int> parties) {
    check_distinct(state, parties);
    if (parties.empty()) throw std::invalid_argument("fidelity needs at least one party");
    // Z factors only matter through their parity, X factors through which
    // parties are flipped.
    double best = 0.0;
    for (std::uint64_t flip = 0; flip < (std::uint64_t{1} << parties.size()); ++flip)
        for (double sign : {1.0, -1.0}) best = std::max(best, projected_weight(state, parties, flip, sign));
    return std::min(best, 1.0);
}

double ghz_overlap(const PureState& state, std::span<const int> parties) {
    check_distinct(state, parties);
    if (parties.empty()) throw std::invalid_argument("fidelity needs at least one party");
    return std::min(projected_weight(state, parties, 0, 1.0), 1.0);
}

bool VerificationCheck::passed() const { return std::abs(value - expected) <= tolerance; }

namespace {

PureState bell_pairs(int count) {
    PureState s = PureState::bell_pair();
    for (int i = 1; i < count; ++i) s = s.tensor(PureState::bell_pair());
    return s;
}

struct BranchSummary {
    double worst = 1.0;
    double probability = 0.0;
};

// k Bell pairs (2i, 2i+1); swap at the inner joints left to right. Returns the
// worst end-to-end Bell overlap and the total probability of all branch paths.
BranchSummary swap_chain(int links) {
    struct Path {
        PureState state;
        double prob;
    };
    std::vector<Path> paths{{bell_pairs(links), 1.0}};
    for (int joint = 0; joint + 1 < links; ++joint) {
        std::vector<Path> next;
        for (auto& p : paths) {
            // After each swap the chain is (0, 1, 2, ...) with the far end last.
            for (auto& b : bell_swap_branches(p.state, 1, 2, 3))
                next.push_back({b.post_state, p.prob * b.probability});
        }
        paths = std::move(next);
    }
    BranchSummary s;
    for (auto& p : paths) {
        const int ends[] = {0, p.state.qubit_count() - 1};
        s.worst = std::min(s.worst, ghz_overlap(p.state, ends));
        s.probability += p.prob;
    }
    return s;
}

BranchSummary fuse_pairs(int pairs) {
    auto state = bell_pairs(pairs);
    std::vector<int> centers, leaves;
    for (int i = 0; i < pairs; ++i) {
        leaves.push_back(2 * i);
        centers.push_back(2 * i + 1);
    }
    BranchSummary s;
    for (auto& b : ghz_fuse_branches(state, centers, leaves)) {
        std::vector<int> all(static_cast<std::size_t>(b.post_state.qubit_count()));
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        s.worst = std::min(s.worst, ghz_overlap(b.post_state, all));
        s.probability += b.probability;
    }
    return s;
}

// Bell(A_b, B) (x) Bell(A_c, C), fan-out at A. Qubits: A_b=0, B=1, A_c=2, C=3.
BranchSummary fanout() {
    BranchSummary s;
    for (auto& b : fanout_ghz_branches(bell_pairs(2), 0, 2, 1)) {
        const int parties[] = {0, 1, 2};  // B, A, C after removing A_b
        s.worst = std::min(s.worst, ghz_overlap(b.post_state, parties));
        s.probability += b.probability;
    }
    return s;
}

// Swap at the root joins (A, R) and (R', B) into Bell(A, B); A then fans out
// with its second pair (A', C). Qubits: A=0, R=1, R'=2, B=3, A'=4, C=5.
BranchSummary swap_then_fanout() {
    BranchSummary s;
    for (auto& sw : bell_swap_branches(bell_pairs(3), 1, 2, 3)) {
        // Now A=0, B=1, A'=2, C=3.
        for (auto& fo : fanout_ghz_branches(sw.post_state, 0, 2, 1)) {
            const int parties[] = {0, 1, 2};
            s.worst = std::min(s.worst, ghz_overlap(fo.post_state, parties));
            s.probability += sw.probability * fo.probability;
        }
    }
    return s;
}

}  // namespace

std::vector<VerificationCheck> run_verification_suite() {
    constexpr double kFidelityTol = 1e-9;
    constexpr double kProbTol = 1e-12;
    std::vector<VerificationCheck> checks;

    auto chain = swap_chain(3);
    checks.push_back({"swap_chain_3_links_bell_fidelity", chain.worst, 1.0, kFidelityTol});
    checks.push_back({"swap_chain_3_links_probability_sum", chain.probability, 1.0, kProbTol});

    double fuse3 = 0.0;
    for (int n = 2; n <= 6; ++n) {
        auto f = fuse_pairs(n);
        if (n == 3) fuse3 = f.worst;
        checks.push_back({"ghz_fuse_" + std::to_string(n) + "_pairs_fidelity", f.worst, 1.0, kFidelityTol});
        checks.push_back({"ghz_fuse_" + std::to_string(n) + "_pairs_probability_sum", f.probability, 1.0, kProbTol});
    }

    auto fo = fanout();
    checks.push_back({"fanout_ghz3_fidelity", fo.worst, 1.0, kFidelityTol});
    checks.push_back({"fanout_ghz3_probability_sum", fo.probability, 1.0, kProbTol});
    checks.push_back({"fanout_vs_fuse_agreement", 1.0 - std::abs(fo.worst - fuse3), 1.0, kFidelityTol});

    auto composite = swap_then_fanout();
    checks.push_back({"swap_then_fanout_ghz3_fidelity", composite.worst, 1.0, kFidelityTol});
    checks.push_back({"swap_then_fanout_probability_sum", composite.probability, 1.0, kProbTol});
    return checks;
}

}  // namespace ghz::verify
