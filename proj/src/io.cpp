#include "incnls/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace incnls {

namespace {

struct FileGuard {
    FILE* f;
    explicit FileGuard(const std::string& path) : f(fopen(path.c_str(), "w")) {
        if (!f) throw std::runtime_error("io: cannot open " + path);
    }
    ~FileGuard() { fclose(f); }
};

// header lines are "# k1=v1 k2=v2 ..."; values contain no spaces
std::map<std::string, std::string> parse_header(std::istream& in,
                                                const std::string& magic) {
    std::string line;
    if (!std::getline(in, line) || line != "# incnls-" + magic + " 1")
        throw std::runtime_error("io: bad or missing container magic (" +
                                 magic + ")");
    std::map<std::string, std::string> kv;
    while (in.peek() == '#') {
        std::getline(in, line);
        std::istringstream ls(line.substr(1));
        std::string tok;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq != std::string::npos)
                kv[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    std::getline(in, line);  // column names
    return kv;
}

const std::string& want(const std::map<std::string, std::string>& kv,
                        const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw std::runtime_error("io: missing header field " + k);
    return it->second;
}

// rebuild the mesh from its serialized key
std::pair<Params, GridPtr> grid_from_key(const std::string& key, double b) {
    int d = 0, n = 0;
    double rmax = 0, sig = 0, th = 0;
    StretchSpec st;
    if (sscanf(key.c_str(), "d%d:n%d:rmax%lg:stretched:%lg:%lg", &d, &n, &rmax,
               &sig, &th) == 5) {
        st.kind = StretchSpec::Kind::stretched;
        st.sigma = sig;
        st.theta = th;
    } else if (sscanf(key.c_str(), "d%d:n%d:rmax%lg:uniform", &d, &n, &rmax) ==
               3) {
        st = StretchSpec::uniform();
    } else {
        throw std::runtime_error("io: unparsable grid key " + key);
    }
    Params p = make_params(d, b);
    GridPtr g = make_grid(p, n, rmax, st);
    if (g->key() != key)
        throw std::runtime_error("io: grid key round-trip mismatch " + key +
                                 " vs " + g->key());
    return {p, g};
}

std::vector<std::vector<double>> read_columns(std::istream& in, size_t ncols) {
    std::vector<std::vector<double>> cols(ncols);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string cell;
        for (size_t c = 0; c < ncols; ++c) {
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error("io: short row in container");
            cols[c].push_back(strtod(cell.c_str(), nullptr));
        }
    }
    return cols;
}

}  // namespace

void save_field(const std::string& path, const RadialField& u,
                const Params& p) {
    FileGuard fg(path);
    fprintf(fg.f, "# incnls-field 1\n# key=%s b=%.17g\nr,re,im\n",
            u.grid->key().c_str(), p.b);
    for (int j = 0; j < u.n(); ++j)
        fprintf(fg.f, "%.17g,%.17g,%.17g\n", u.grid->r[j], u.v[j].real(),
                u.v[j].imag());
}

LoadedField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open " + path);
    auto kv = parse_header(in, "field");
    auto [p, g] = grid_from_key(want(kv, "key"), strtod(want(kv, "b").c_str(), nullptr));
    auto cols = read_columns(in, 3);
    if ((int)cols[0].size() != g->n_cells)
        throw std::runtime_error("io: field row count mismatch");
    RadialField u(g);
    for (int j = 0; j < g->n_cells; ++j)
        u.v[j] = Complex(cols[1][j], cols[2][j]);
    return {p, u};
}

void save_eigen(const std::string& path, const EigenBundle& eig,
                const GridPtr& grid, const Params& p) {
    FileGuard fg(path);
    fprintf(fg.f,
            "# incnls-eigen 1\n"
            "# key=%s b=%.17g e0=%.17g residual=%.17g sign_ok=%d\n"
            "# p_min=%.17g p_second=%.17g\n"
            "r,y1re,y1im,y2re,y2im\n",
            grid->key().c_str(), p.b, eig.e0, eig.residual_plus,
            eig.sign_convention_ok ? 1 : 0, eig.p_min_eig, eig.p_second_eig);
    for (int j = 0; j < grid->n_cells; ++j)
        fprintf(fg.f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", grid->r[j],
                eig.Y1.v[j].real(), eig.Y1.v[j].imag(), eig.Y2.v[j].real(),
                eig.Y2.v[j].imag());
}

EigenBundle load_eigen(const std::string& path, const GridPtr& grid,
                       const Params& p) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open " + path);
    auto kv = parse_header(in, "eigen");
    if (want(kv, "key") != grid->key() ||
        strtod(want(kv, "b").c_str(), nullptr) != p.b)
        throw std::invalid_argument("io: eigen cache key mismatch for " + path);
    EigenBundle eig;
    eig.e0 = strtod(want(kv, "e0").c_str(), nullptr);
    eig.residual_plus = strtod(want(kv, "residual").c_str(), nullptr);
    eig.sign_convention_ok = want(kv, "sign_ok") == "1";
    eig.p_min_eig = strtod(want(kv, "p_min").c_str(), nullptr);
    eig.p_second_eig = strtod(want(kv, "p_second").c_str(), nullptr);
    auto cols = read_columns(in, 5);
    if ((int)cols[0].size() != grid->n_cells)
        throw std::runtime_error("io: eigen row count mismatch");
    eig.Y1 = RadialField(grid);
    eig.Y2 = RadialField(grid);
    for (int j = 0; j < grid->n_cells; ++j) {
        eig.Y1.v[j] = Complex(cols[1][j], cols[2][j]);
        eig.Y2.v[j] = Complex(cols[3][j], cols[4][j]);
    }
    return eig;
}

void save_family(const std::string& path, const ApproxFamily& fam,
                 const GridPtr& grid, const Params& p) {
    FileGuard fg(path);
    fprintf(fg.f,
            "# incnls-family 1\n"
            "# key=%s b=%.17g a=%.17g k=%d e0=%.17g q_radius=%.17g\n# fit=",
            grid->key().c_str(), p.b, fam.a, fam.k, fam.e0, fam.q_radius);
    for (size_t i = 0; i < fam.fit_residuals.size(); ++i)
        fprintf(fg.f, "%s%.17g", i ? ";" : "", fam.fit_residuals[i]);
    fprintf(fg.f, "\nr");
    for (int j = 1; j <= fam.k; ++j) fprintf(fg.f, ",phi%d_1,phi%d_2", j, j);
    fprintf(fg.f, "\n");
    for (int i = 0; i < grid->n_cells; ++i) {
        fprintf(fg.f, "%.17g", grid->r[i]);
        for (int j = 0; j < fam.k; ++j)
            fprintf(fg.f, ",%.17g,%.17g", fam.Phi[j].v1[i], fam.Phi[j].v2[i]);
        fprintf(fg.f, "\n");
    }
}

ApproxFamily load_family(const std::string& path, const GridPtr& grid,
                         const Params& p) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open " + path);
    auto kv = parse_header(in, "family");
    if (want(kv, "key") != grid->key() ||
        strtod(want(kv, "b").c_str(), nullptr) != p.b)
        throw std::invalid_argument("io: family cache key mismatch for " + path);
    ApproxFamily fam;
    fam.a = strtod(want(kv, "a").c_str(), nullptr);
    fam.k = atoi(want(kv, "k").c_str());
    fam.e0 = strtod(want(kv, "e0").c_str(), nullptr);
    fam.q_radius = strtod(want(kv, "q_radius").c_str(), nullptr);
    {
        std::istringstream fs(want(kv, "fit"));
        std::string cell;
        while (std::getline(fs, cell, ';'))
            fam.fit_residuals.push_back(strtod(cell.c_str(), nullptr));
    }
    auto cols = read_columns(in, 1 + 2 * fam.k);
    if ((int)cols[0].size() != grid->n_cells)
        throw std::runtime_error("io: family row count mismatch");
    for (int j = 0; j < fam.k; ++j) {
        PairField f(grid);
        for (int i = 0; i < grid->n_cells; ++i) {
            f.v1[i] = cols[1 + 2 * j][i];
            f.v2[i] = cols[2 + 2 * j][i];
        }
        fam.Phi.push_back(std::move(f));
    }
    return fam;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    static const char* names[] = {"time_limit", "blowup_indicator",
                                  "resolution_loss"};
    FileGuard fg(path);
    fprintf(fg.f, "# incnls-trajectory 1\n# key=%s stop=%s\n",
            traj.params_key.c_str(), names[(int)traj.stop_reason]);
    fprintf(fg.f, "t,energy,mass,grad_norm_sq,d_u\n");
    for (const auto& r : traj.diag)
        fprintf(fg.f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.energy, r.mass,
                r.grad_norm_sq, r.d_u);
}

void write_tracker_csv(const std::string& path,
                       const std::vector<TrackRecord>& seq) {
    FileGuard fg(path);
    fprintf(fg.f, "t,theta,mu,beta,d_u,ratio_lemma43,valid\n");
    for (const auto& r : seq)
        fprintf(fg.f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.t,
                r.state.theta, r.state.mu, r.state.beta, r.state.d_u,
                r.drift_ratio, r.ok && r.state.valid ? 1 : 0);
}

std::string fnv1a_hex(const std::string& text) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

}  // namespace incnls
