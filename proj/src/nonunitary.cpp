#include "mqspin/nonunitary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "mqspin/error.hpp"
#include "mqspin/evolution.hpp"

namespace mqspin {

DensityMatrix crush(const DensityMatrix& rho) {
    CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
    out.diagonal() = rho.matrix().diagonal();
    // a Hermitian diagonal is real; drop rounding residue in the imaginary part
    out.diagonal() = out.diagonal().real().cast<Complex>();
    return DensityMatrix(std::move(out), rho.convention());
}

std::vector<Transition> TransitionGraph::involving(std::size_t state) const {
    std::vector<Transition> out;
    for (const auto& t : transitions) {
        if (t.upper == state || t.lower == state) out.push_back(t);
    }
    return out;
}

void TransitionGraph::write_csv(std::ostream& out) const {
    const auto old_precision = out.precision(15);
    out << "a,b,m_a,m_b,frequency,strength\n";
    for (const auto& t : transitions) {
        out << t.upper << ',' << t.lower << ',' << 0.5 * states.twice_m[t.upper] << ','
            << 0.5 * states.twice_m[t.lower] << ',' << t.frequency << ',' << t.strength << '\n';
    }
    out.precision(old_precision);
}

TransitionGraph build_transition_graph(const Operator& h_secular, const ZeemanBasis& basis,
                                       double relative_threshold) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    if (h_secular.dim() != dim) {
        throw ValidationError("secular Hamiltonian dimension does not match basis");
    }
    if (!h_secular.hermitian) throw ValidationError("secular Hamiltonian must be Hermitian");
    const double hnorm = h_secular.matrix.norm();
    for (Eigen::Index b = 0; b < dim; ++b) {
        for (Eigen::Index a = 0; a < dim; ++a) {
            if (basis.twice_m(static_cast<std::size_t>(a)) !=
                    basis.twice_m(static_cast<std::size_t>(b)) &&
                std::abs(h_secular.matrix(a, b)) > 1e-12 * std::max(hnorm, 1.0)) {
                throw ValidationError("Hamiltonian does not conserve total magnetization");
            }
        }
    }

    // Zeeman indices of each m block, ascending m
    std::map<int, std::vector<Eigen::Index>> blocks;
    for (Eigen::Index s = 0; s < dim; ++s) {
        blocks[basis.twice_m(static_cast<std::size_t>(s))].push_back(s);
    }

    TransitionGraph graph;
    auto& st = graph.states;
    st.energies.resize(dim);
    st.vectors = CMatrix::Zero(dim, dim);
    st.twice_m.resize(static_cast<std::size_t>(dim));

    struct BlockInfo {
        std::vector<Eigen::Index> zeeman;
        Eigen::Index first_state;
        CMatrix vectors;  // block-local eigenvectors
    };
    std::map<int, BlockInfo> solved;
    Eigen::Index next = 0;
    for (const auto& [twice_m, idx] : blocks) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        CMatrix sub(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) sub(i, j) = h_secular.matrix(idx[i], idx[j]);
        }
        const EigenSystem es = diagonalize(Operator(0.5 * (sub + sub.adjoint()), true));
        for (Eigen::Index k = 0; k < n; ++k) {
            st.energies(next + k) = es.eigenvalues(k);
            st.twice_m[static_cast<std::size_t>(next + k)] = twice_m;
            for (Eigen::Index i = 0; i < n; ++i) st.vectors(idx[i], next + k) = es.eigenvectors(i, k);
        }
        solved[twice_m] = BlockInfo{idx, next, es.eigenvectors};
        next += n;
    }
    st.index_down = static_cast<std::size_t>(solved.begin()->second.first_state);
    st.index_up = static_cast<std::size_t>(solved.rbegin()->second.first_state);

    const Operator iplus = collective_op(basis, SpinComponent::plus);
    std::vector<Transition> all;
    for (const auto& [twice_m, lower] : solved) {
        const auto it = solved.find(twice_m + 2);
        if (it == solved.end()) continue;
        const auto& upper = it->second;
        CMatrix block(static_cast<Eigen::Index>(upper.zeeman.size()),
                      static_cast<Eigen::Index>(lower.zeeman.size()));
        for (Eigen::Index j = 0; j < block.cols(); ++j) {
            for (Eigen::Index i = 0; i < block.rows(); ++i) {
                block(i, j) = iplus.matrix(upper.zeeman[static_cast<std::size_t>(i)],
                                           lower.zeeman[static_cast<std::size_t>(j)]);
            }
        }
        const CMatrix amplitudes = upper.vectors.adjoint() * block * lower.vectors;
        for (Eigen::Index j = 0; j < amplitudes.cols(); ++j) {
            for (Eigen::Index i = 0; i < amplitudes.rows(); ++i) {
                const auto a = static_cast<std::size_t>(upper.first_state + i);
                const auto b = static_cast<std::size_t>(lower.first_state + j);
                all.push_back(Transition{a, b, st.energies(static_cast<Eigen::Index>(a)) -
                                                   st.energies(static_cast<Eigen::Index>(b)),
                                         std::norm(amplitudes(i, j))});
            }
        }
    }
    double max_strength = 0.0;
    for (const auto& t : all) max_strength = std::max(max_strength, t.strength);
    for (const auto& t : all) {
        if (t.strength > relative_threshold * max_strength) graph.transitions.push_back(t);
    }
    return graph;
}

RVector eigenstate_populations(const DensityMatrix& rho, const EigenstateBasis& states) {
    if (rho.dim() != static_cast<Eigen::Index>(states.size())) {
        throw ValidationError("density matrix does not match the eigenstate basis");
    }
    const CMatrix in_eigenbasis = states.vectors.adjoint() * rho.matrix() * states.vectors;
    return in_eigenbasis.diagonal().real();
}

SaturationMode parse_saturation_mode(const std::string& s) {
    if (s == "timed") return SaturationMode::timed;
    if (s == "steady_state") return SaturationMode::steady_state;
    throw ValidationError("saturation mode must be 'timed' or 'steady_state', got '" + s + "'");
}

std::string to_string(SaturationMode mode) {
    return mode == SaturationMode::timed ? "timed" : "steady_state";
}

void SaturationParams::validate() const {
    if (!(width_sigma > 0.0)) throw ValidationError("saturation width must be positive");
    if (!(rate_scale > 0.0)) throw ValidationError("saturation rate scale must be positive");
    if (!(duration > 0.0)) throw ValidationError("saturation duration must be positive");
    if (!std::isfinite(center_frequency)) throw ValidationError("saturation center is not finite");
    if (!(envelope_cutoff >= 0.0 && envelope_cutoff < 1.0)) {
        throw ValidationError("envelope cutoff must lie in [0, 1)");
    }
}

SaturationParams default_saturation_params(const TransitionGraph& graph) {
    const auto& st = graph.states;
    std::optional<double> from_down;
    std::optional<double> into_up;
    for (const auto& t : graph.transitions) {
        if (t.lower == st.index_down) from_down = t.frequency;
        if (t.upper == st.index_up) into_up = t.frequency;
    }
    if (!from_down || !into_up) {
        throw ValidationError("no single-quantum transition out of |d> or into |u>");
    }
    const double gap = std::abs(*into_up - *from_down);
    if (!(gap > 0.0)) throw ValidationError("|d> and |u> transitions coincide; cannot separate");
    SaturationParams p;
    p.center_frequency = *from_down;
    p.width_sigma = gap / 4.0;
    return p;
}

double saturation_envelope(const SaturationParams& params, double frequency) {
    const double x = (frequency - params.center_frequency) / params.width_sigma;
    return std::exp(-0.5 * x * x);
}

RMatrix saturation_rates(const TransitionGraph& graph, const SaturationParams& params,
                         bool apply_cutoff) {
    params.validate();
    const auto n = static_cast<Eigen::Index>(graph.states.size());
    RMatrix w = RMatrix::Zero(n, n);
    for (const auto& t : graph.transitions) {
        const double env = saturation_envelope(params, t.frequency);
        if (apply_cutoff && env < params.envelope_cutoff) continue;
        const double rate = params.rate_scale * t.strength * env;
        const auto a = static_cast<Eigen::Index>(t.upper);
        const auto b = static_cast<Eigen::Index>(t.lower);
        w(a, b) += rate;
        w(b, a) += rate;
    }
    return w;
}

RVector integrate_rates(const RVector& populations, const RMatrix& rates, double duration) {
    if (!(duration >= 0.0)) throw ValidationError("integration time must be non-negative");
    const Eigen::Index n = populations.size();
    if (rates.rows() != n || rates.cols() != n) {
        throw ValidationError("rate matrix does not match population vector");
    }
    // Components of the rate graph evolve independently and each keeps its sum
    // exactly; solving them separately keeps the eigensolver away from the
    // degenerate null space of the full Laplacian.
    std::vector<Eigen::Index> comp(static_cast<std::size_t>(n), -1);
    RVector out = populations;
    for (Eigen::Index seed = 0; seed < n; ++seed) {
        if (comp[static_cast<std::size_t>(seed)] >= 0) continue;
        std::vector<Eigen::Index> members{seed};
        comp[static_cast<std::size_t>(seed)] = seed;
        for (std::size_t k = 0; k < members.size(); ++k) {
            for (Eigen::Index b = 0; b < n; ++b) {
                if (rates(members[k], b) > 0.0 && comp[static_cast<std::size_t>(b)] < 0) {
                    comp[static_cast<std::size_t>(b)] = seed;
                    members.push_back(b);
                }
            }
        }
        if (members.size() == 1) continue;

        const auto m = static_cast<Eigen::Index>(members.size());
        RMatrix w(m, m);
        RVector p(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            p(i) = populations(members[static_cast<std::size_t>(i)]);
            for (Eigen::Index j = 0; j < m; ++j) {
                w(i, j) = rates(members[static_cast<std::size_t>(i)], members[static_cast<std::size_t>(j)]);
            }
        }
        const RMatrix laplacian = RMatrix(w.rowwise().sum().asDiagonal()) - w;
        Eigen::SelfAdjointEigenSolver<RMatrix> es(laplacian);
        if (es.info() != Eigen::Success) throw NumericalError("rate matrix eigensolver failed");
        const RVector decay = es.eigenvalues().unaryExpr(
            [duration](double lambda) { return std::exp(-std::max(lambda, 0.0) * duration); });
        RVector q = es.eigenvectors() * (decay.asDiagonal() * (es.eigenvectors().transpose() * p));
        q.array() += (p.sum() - q.sum()) / static_cast<double>(m);
        for (Eigen::Index i = 0; i < m; ++i) out(members[static_cast<std::size_t>(i)]) = q(i);
    }
    return out;
}

RVector saturate(const RVector& populations, const TransitionGraph& graph,
                 const SaturationParams& params) {
    params.validate();
    if (populations.size() != static_cast<Eigen::Index>(graph.states.size())) {
        throw ValidationError("population vector length " + std::to_string(populations.size()) +
                              " does not match " + std::to_string(graph.states.size()) +
                              " eigenstates");
    }
    const bool steady = params.mode == SaturationMode::steady_state;
    const RMatrix w = saturation_rates(graph, params, steady);
    if (!steady) return integrate_rates(populations, w, params.duration);

    const RMatrix laplacian = RMatrix(w.rowwise().sum().asDiagonal()) - w;
    double horizon = params.duration;
    for (int iter = 0; iter < 256; ++iter) {
        RVector p = integrate_rates(populations, w, horizon);
        if ((laplacian * p).cwiseAbs().maxCoeff() < 1e-12) return p;
        horizon *= 2.0;
    }
    throw NumericalError("saturation did not reach steady state");
}

}  // namespace mqspin
