// Builds a two-block system with coupled feedthrough, walks it through the
// minimality criteria, and prints the disjoining feedback it admits.
#include <iostream>

#include "rlab/feedback.hpp"
#include "rlab/io.hpp"
#include "rlab/minimality.hpp"

int main() {
  using namespace rlab;
  Realization r;
  r.A = CMatrix::Zero(2, 2);
  r.A(1, 1) = 2.0;
  r.B = 2.0 * CMatrix::Identity(2, 2);
  r.C = CMatrix::Identity(2, 2);
  r.D = CMatrix::Identity(2, 2);

  const Tolerances tol{};
  std::cout << "open-loop eigenvalues: " << to_json(spectrum(r.A).values).dump()
            << "\n";
  std::cout << "system-matrix eigenvalues: "
            << to_json(spectrum(assemble_system_matrix(r).L).values).dump()
            << "\n\n";

  const MinimalityVerdict verdict = is_minimal(r, tol);
  std::cout << "minimality verdict:\n" << to_json(verdict).dump(2) << "\n\n";

  const FeedbackSearch fb = find_disjoining_feedback(r, tol, 1);
  std::cout << "disjoining feedback:\n" << to_json(fb).dump(2) << "\n\n";
  if (fb.found) {
    const Realization strict = associated(r);
    const Realization closed = closed_loop(strict, fb.K);
    std::cout << "closed-loop eigenvalues: "
              << to_json(spectrum(closed.A).values).dump() << "\n";
  }

  std::cout << "\nfull criteria report:\n"
            << to_json(minimality_equivalence_report(r, tol, 1)).dump(2) << "\n";
  return 0;
}
