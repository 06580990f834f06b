#pragma once

#include <string>
#include <vector>

#include "incnls/approx.hpp"
#include "incnls/evolution.hpp"
#include "incnls/modulation.hpp"

namespace incnls {

// Self-describing CSV containers. Every file opens with
//   # incnls-<kind> 1
//   # key=<grid key> b=<value> [kind-specific scalars]
// followed by a column-name row and %.17g data rows; the grid key encodes
// (d, n_cells, r_max, stretch) so loaders rebuild the exact mesh. Numeric
// formatting is fixed, so identical inputs produce identical bytes.

void save_field(const std::string& path, const RadialField& u, const Params& p);
struct LoadedField {
    Params params;
    RadialField field;
};
LoadedField load_field(const std::string& path);

// eigenpair cache; loaders check the grid key and b against the request
void save_eigen(const std::string& path, const EigenBundle& eig,
                const GridPtr& grid, const Params& p);
EigenBundle load_eigen(const std::string& path, const GridPtr& grid,
                       const Params& p);

void save_family(const std::string& path, const ApproxFamily& fam,
                 const GridPtr& grid, const Params& p);
ApproxFamily load_family(const std::string& path, const GridPtr& grid,
                         const Params& p);

// per-snapshot diagnostics: t,energy,mass,grad_norm_sq,d_u (+ stop reason
// in the header)
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// stable tracker columns: t,theta,mu,beta,d_u,ratio_lemma43,valid
void write_tracker_csv(const std::string& path,
                       const std::vector<TrackRecord>& seq);

// FNV-1a 64-bit hex digest (config fingerprints in manifests)
std::string fnv1a_hex(const std::string& text);

}  // namespace incnls
