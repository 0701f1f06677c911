#include "mqspin/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mqspin/error.hpp"
#include "mqspin/kernels.hpp"

namespace mqspin {

namespace {

// Replaces each degenerate eigenspace basis by the Gram-Schmidt
// orthonormalization of the projected unit vectors e_0, e_1, ... so the result
// does not depend on what the solver returned.
void canonicalize_degenerate(const RVector& values, CMatrix& vectors) {
    const Eigen::Index dim = values.size();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    const double degenerate_tol = 1e-9 * scale;

    Eigen::Index start = 0;
    while (start < dim) {
        Eigen::Index stop = start + 1;
        while (stop < dim && values(stop) - values(stop - 1) <= degenerate_tol) ++stop;
        const Eigen::Index g = stop - start;
        if (g > 1) {
            const CMatrix q = vectors.middleCols(start, g);
            CMatrix chosen(dim, g);
            Eigen::Index found = 0;
            for (Eigen::Index e = 0; e < dim && found < g; ++e) {
                // P e_e = Q (Q^dagger e_e) = Q * conj(row e of Q)^T
                Eigen::VectorXcd v = q * q.row(e).adjoint();
                for (Eigen::Index k = 0; k < found; ++k) {
                    v -= chosen.col(k) * chosen.col(k).dot(v);
                }
                const double norm = v.norm();
                if (norm > 1e-6) chosen.col(found++) = v / norm;
            }
            if (found != g) {
                throw NumericalError("failed to canonicalize a degenerate eigenspace");
            }
            vectors.middleCols(start, g) = chosen;
        }
        start = stop;
    }
}

void fix_phases(CMatrix& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        auto col = vectors.col(c);
        for (Eigen::Index r = 0; r < col.size(); ++r) {
            const double mag = std::abs(col(r));
            if (mag > 1e-6) {
                col *= std::conj(col(r)) / mag;
                break;
            }
        }
    }
}

CMatrix propagate(const CMatrix& rho, const EigenSystem& es, double t) {
    const auto& v = es.eigenvectors;
    CMatrix rotated = v.adjoint() * rho * v;
    const Eigen::Index dim = rotated.rows();
    for (Eigen::Index k = 0; k < dim; ++k) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double angle = -(es.eigenvalues(j) - es.eigenvalues(k)) * t;
            rotated(j, k) *= Complex(std::cos(angle), std::sin(angle));
        }
    }
    CMatrix out = v * rotated * v.adjoint();
    return 0.5 * (out + out.adjoint());
}

}  // namespace

EigenSystem diagonalize(const Operator& h) {
    if (!h.hermitian) throw ValidationError("diagonalize requires a Hermitian operator");
    if (h.matrix.rows() != h.matrix.cols()) throw ValidationError("operator must be square");

    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Hermitian eigensolver did not converge");
    }
    EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
    canonicalize_degenerate(es.eigenvalues, es.eigenvectors);
    fix_phases(es.eigenvectors);

    const Eigen::Index dim = h.matrix.rows();
    const double hnorm = std::max(h.matrix.norm(), 1e-300);
    const double residual =
        (h.matrix * es.eigenvectors - es.eigenvectors * es.eigenvalues.asDiagonal()).norm();
    const double orthogonality =
        (es.eigenvectors.adjoint() * es.eigenvectors - CMatrix::Identity(dim, dim)).norm();
    if (residual > 1e-10 * hnorm || orthogonality > 1e-10) {
        throw NumericalError("eigendecomposition residual too large");
    }
    return es;
}

DensityMatrix evolve(const DensityMatrix& rho, const Operator& h, double t) {
    if (rho.dim() != h.dim()) {
        throw ValidationError("density matrix and Hamiltonian dimensions differ");
    }
    if (t == 0.0) return rho;
    return evolve(rho, diagonalize(h), t);
}

DensityMatrix evolve(const DensityMatrix& rho, const EigenSystem& es, double t) {
    if (rho.dim() != es.eigenvalues.size()) {
        throw ValidationError("density matrix and Hamiltonian dimensions differ");
    }
    return DensityMatrix(propagate(rho.matrix(), es, t), rho.convention());
}

FrequencyUnit parse_frequency_unit(const std::string& s) {
    if (s == "angular") return FrequencyUnit::angular;
    if (s == "cyclic") return FrequencyUnit::cyclic;
    throw ValidationError("frequency unit must be 'angular' or 'cyclic', got '" + s + "'");
}

std::string to_string(FrequencyUnit unit) {
    return unit == FrequencyUnit::cyclic ? "cyclic" : "angular";
}

SweepTable::SweepTable(std::vector<double> times, std::vector<std::string> names, RMatrix values)
    : times_(std::move(times)), names_(std::move(names)), values_(std::move(values)) {
    if (static_cast<Eigen::Index>(times_.size()) != values_.rows() ||
        static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
        throw ValidationError("sweep table shape does not match its grid and names");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw ValidationError("sweep grid must be strictly increasing");
        }
    }
}

bool SweepTable::has(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

RVector SweepTable::column(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw ValidationError("sweep has no observable '" + name + "'");
    return values_.col(std::distance(names_.begin(), it));
}

void SweepTable::write_csv(std::ostream& out) const {
    const auto old_precision = out.precision(15);
    out << "t";
    for (const auto& n : names_) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < times_.size(); ++r) {
        out << times_[r];
        for (Eigen::Index c = 0; c < values_.cols(); ++c) {
            out << ',' << values_(static_cast<Eigen::Index>(r), c);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

std::vector<double> uniform_grid(double t_min, double t_max, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("time step must be positive");
    if (!(t_max >= t_min)) throw ValidationError("time grid upper bound below lower bound");
    const auto count = static_cast<std::size_t>(std::floor((t_max - t_min) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = t_min + static_cast<double>(i) * step;
    return grid;
}

SweepTable sweep(const DensityMatrix& rho0, const Operator& h, std::span<const double> grid,
                 std::span<const Observable> observables, double time_scale, Execution exec) {
    if (rho0.dim() != h.dim()) {
        throw ValidationError("density matrix and Hamiltonian dimensions differ");
    }
    return sweep(rho0, diagonalize(h), grid, observables, time_scale, exec);
}

SweepTable sweep(const DensityMatrix& rho0, const EigenSystem& es, std::span<const double> grid,
                 std::span<const Observable> observables, double time_scale, Execution exec) {
    if (grid.empty()) throw ValidationError("sweep grid is empty");
    if (rho0.dim() != es.eigenvalues.size()) {
        throw ValidationError("density matrix and Hamiltonian dimensions differ");
    }
    std::vector<double> phases(grid.size());
    std::transform(grid.begin(), grid.end(), phases.begin(),
                   [time_scale](double t) { return t * time_scale; });
    RMatrix values = exec == Execution::parallel
                         ? kernels::evaluate_grid_parallel(es, rho0.matrix(), phases, observables)
                         : kernels::evaluate_grid_serial(es, rho0.matrix(), phases, observables);
    std::vector<std::string> names;
    names.reserve(observables.size());
    for (const auto& o : observables) names.push_back(o.name);
    return SweepTable(std::vector<double>(grid.begin(), grid.end()), std::move(names),
                      std::move(values));
}

}  // namespace mqspin
