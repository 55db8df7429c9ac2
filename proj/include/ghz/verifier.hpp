#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ghz/random.hpp"

// Small pure-state simulator used to check the quantum operations that the
// routing layer reduces to success probabilities. Qubit i is bit i of the
// basis index.
namespace ghz::verify {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 12;

class PureState {
  public:
    /// |0...0> on `qubits` qubits.
    explicit PureState(int qubits);

    static PureState basis(int qubits, std::uint64_t index);
    /// Amplitudes must have power-of-two length and unit norm within 1e-12.
    static PureState from_amplitudes(std::vector<Amplitude> amplitudes);
    /// (|00> + |11>) / sqrt(2).
    static PureState bell_pair();
    /// (|0...0> + |1...1>) / sqrt(2).
    static PureState ghz(int qubits);

    /// Appends `rhs` above this state's qubits: rhs qubit j becomes j + qubit_count().
    PureState tensor(const PureState& rhs) const;

    int qubit_count() const { return qubits_; }
    std::span<const Amplitude> amplitudes() const { return amp_; }
    Amplitude amplitude(std::uint64_t index) const { return amp_.at(index); }
    double norm_squared() const;

  private:
    friend class StateAccess;
    PureState(int qubits, std::vector<Amplitude> amp) : qubits_(qubits), amp_(std::move(amp)) {}

    int qubits_;
    std::vector<Amplitude> amp_;
};

enum class GateKind { H, X, Z, CNOT };

struct Gate {
    GateKind kind;
    int target;
    int control = -1;

    static Gate h(int q) { return {GateKind::H, q}; }
    static Gate x(int q) { return {GateKind::X, q}; }
    static Gate z(int q) { return {GateKind::Z, q}; }
    static Gate cnot(int control, int target) { return {GateKind::CNOT, target, control}; }
};

PureState apply_gate(PureState state, const Gate& gate);

struct PauliCorrection {
    int qubit;  ///< index in the post-measurement state
    bool x;
    bool z;
};

struct MeasurementOutcome {
    std::vector<int> bits;  ///< one per measured qubit, in the order given
    double probability = 0.0;
    PureState post_state{0};
    /// Corrections that were applied (only when correction targets were given).
    std::vector<PauliCorrection> corrections;
};

/// Every Z-basis outcome of the listed qubits with non-zero probability. The
/// measured qubits are removed and the remaining ones relabelled downward.
std::vector<MeasurementOutcome> measure_branches(const PureState& state, std::span<const int> qubits);

/// Bell-basis measurement of (a, b). When `partner` names the qubit that
/// shares a Bell pair with a or b, the outcome's Pauli correction
/// X^{m_b} Z^{m_a} is applied there so the canonical pair results.
std::vector<MeasurementOutcome> bell_swap_branches(const PureState& state, int a, int b,
                                                   std::optional<int> partner = std::nullopt);
MeasurementOutcome bell_swap(const PureState& state, int a, int b, RandomStream& rng,
                             std::optional<int> partner = std::nullopt);

/// GHZ-basis fusion of co-located qubits, each half of a distinct Bell pair:
/// CNOT from the first centre qubit to the others, H on the first, measure
/// all. partners[i] (optional) is the far half paired with centers[i]; it
/// receives X^{m_i} for i > 0 and Z^{m_0} for i = 0.
std::vector<MeasurementOutcome> ghz_fuse_branches(const PureState& state, std::span<const int> centers,
                                                  std::span<const int> partners = {});
MeasurementOutcome ghz_fuse(const PureState& state, std::span<const int> centers, RandomStream& rng,
                            std::span<const int> partners = {});

/// Measurement-completed fan-out at a node holding halves of Bell(A, B) and
/// Bell(A, C): CNOT with the C-side qubit as control and the B-side qubit as
/// target, then Z-measure the B-side qubit and send X^m to B (`partner_b`).
std::vector<MeasurementOutcome> fanout_ghz_branches(const PureState& state, int holder_b, int holder_c,
                                                    std::optional<int> partner_b = std::nullopt);
MeasurementOutcome fanout_ghz(const PureState& state, int holder_b, int holder_c, RandomStream& rng,
                              std::optional<int> partner_b = std::nullopt);

/// max over local Pauli corrections on `parties` of <GHZ| rho_parties |GHZ>.
double ghz_fidelity(const PureState& state, std::span<const int> parties);
/// Same quantity with no correction.
double ghz_overlap(const PureState& state, std::span<const int> parties);

struct VerificationCheck {
    std::string name;
    double value;     ///< worst case over measurement branches
    double expected;
    double tolerance;

    bool passed() const;
};

/// Fixed suite backing the `verify` command.
std::vector<VerificationCheck> run_verification_suite();

}  // namespace ghz::verify
