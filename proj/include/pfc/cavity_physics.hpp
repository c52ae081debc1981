#ifndef PFC_CAVITY_PHYSICS_HPP
#define PFC_CAVITY_PHYSICS_HPP

#include "pfc/params.hpp"
#include "pfc/vec3.hpp"

namespace pfc {

// Position -> coupling strength. Gaussian in the radial plane, standing
// wave along the cavity axis; may be negative away from an antinode
// (transmission only ever sees g^2).
double coupling_at(const Vec3& pos, const CavityParams& c);

// On-resonance probe transmission normalized to the empty cavity,
// T(g) = (kappa*gamma / (kappa*gamma + g^2))^2. Strictly decreasing in |g|.
double transmission(double g, const CavityParams& c);

// Free-space scattering rate, peak-normalized to max_scatter_rate. The
// shape g^2*kg/(kg+g^2)^2 is the atomic excitation of the driven two-mode
// steady state; its maximum 1/4 sits at g^2 = kappa*gamma.
double scattering_rate(double g, const CavityParams& c);

// Photon detection rate, empty_detect_rate * transmission(g).
double detection_rate(double g, const CavityParams& c);

// Modulated standing-wave trap, U = -U0*(1+mod)*exp(-2 r^2/w^2)*cos^2(2 pi z/lambda).
double trap_potential(const Vec3& pos, const TrapParams& t, double mod);

// Analytic -grad U of the same potential.
Vec3 trap_force(const Vec3& pos, const TrapParams& t, double mod);

// Small-oscillation frequencies at the trap minimum:
//   omega_radial = (2/w) sqrt(U0/m),  omega_axial = (2 pi/lambda) sqrt(2 U0/m).
TrapFrequencies derive_trap_frequencies(const TrapParams& t);

// Combined field evaluation for the integrator hot loop: unmodulated force
// and potential plus the probe coupling, sharing the radial exponentials.
struct FieldSample {
  Vec3 force_unmod;      // N at mod = 0; scale by (1+mod)
  double potential_unmod;  // J at mod = 0
  double coupling;       // rad/s
};
FieldSample eval_fields(const Vec3& pos, const TrapParams& t, const CavityParams& c);

}  // namespace pfc

#endif
