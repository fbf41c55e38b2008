#include "scos/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "scos/errors.hpp"

namespace scos {

namespace {

std::string fmt_prob(double s) {
    std::ostringstream os;
    os.precision(12);
    os << s;
    return os.str();
}

void check_binary(const std::vector<int>& v, const std::string& where, std::vector<std::string>& out) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0 && v[i] != 1)
            out.push_back(where + ": flag for station " + std::to_string(i + 1) + " is not 0/1");
}

template <class S>
void check_probs(const std::vector<S>& set, const std::string& where, std::vector<std::string>& out) {
    if (set.empty()) {
        out.push_back(where + ": empty scenario set");
        return;
    }
    double sum = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double p = set[i].p;
        if (!(p >= 0 && p <= 1))
            out.push_back(where + "[" + std::to_string(i) + "]: probability " + fmt_prob(p) + " outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTol)
        out.push_back(where + ": probabilities sum to " + fmt_prob(sum));
}

} // namespace

std::vector<std::string> validate_tree(const ScenarioTree& tree) {
    std::vector<std::string> out;
    if (tree.z < 2)
        out.push_back("z must be >= 2 (got " + std::to_string(tree.z) + ")");
    if (tree.num_stations < 1)
        out.push_back("tree needs at least one station");
    if (tree.slots.empty())
        out.push_back("tree has no time slots");
    const std::size_t ny = static_cast<std::size_t>(std::max(tree.num_stations, 0));
    for (std::size_t t = 0; t < tree.slots.size(); ++t) {
        const auto& slot = tree.slots[t];
        const std::string st = "slot " + std::to_string(t + 1);
        if (!slot.weather.empty()) {
            check_probs(slot.weather, st + " weather", out);
            for (std::size_t i = 0; i < slot.weather.size(); ++i) {
                const std::string w = st + " weather[" + std::to_string(i) + "]";
                if (slot.weather[i].g.size() != ny)
                    out.push_back(w + ": expected " + std::to_string(ny) + " station flags");
                check_binary(slot.weather[i].g, w, out);
            }
        }
        check_probs(slot.demand, st + " demand", out);
        for (std::size_t i = 0; i < slot.demand.size(); ++i) {
            const std::string w = st + " demand[" + std::to_string(i) + "]";
            if (slot.demand[i].d.size() != ny)
                out.push_back(w + ": expected " + std::to_string(ny) + " dimensions");
            for (std::size_t y = 0; y < slot.demand[i].d.size(); ++y)
                if (slot.demand[i].d[y] <= 0)
                    out.push_back(w + ": dimension for station " + std::to_string(y + 1) + " must be > 0");
        }
        if (tree.z >= 2 && slot.shortfall.size() != static_cast<std::size_t>(tree.z - 2))
            out.push_back(st + ": expected " + std::to_string(tree.z - 2) + " shortfall stages, got " +
                          std::to_string(slot.shortfall.size()));
        bool shapes_ok = true;
        for (std::size_t j = 0; j < slot.shortfall.size(); ++j) {
            const std::string sj = st + " shortfall stage " + std::to_string(j + 3);
            check_probs(slot.shortfall[j], sj, out);
            for (std::size_t i = 0; i < slot.shortfall[j].size(); ++i) {
                const auto& s = slot.shortfall[j][i];
                const std::string w = sj + "[" + std::to_string(i) + "]";
                if (s.f.size() != ny || s.a.size() != ny) {
                    out.push_back(w + ": expected " + std::to_string(ny) + " flags and magnitudes");
                    shapes_ok = false;
                    continue;
                }
                check_binary(s.f, w, out);
                for (std::size_t y = 0; y < ny; ++y) {
                    if (s.a[y] < 0)
                        out.push_back(w + ": negative magnitude for station " + std::to_string(y + 1));
                    if (s.f[y] == 0 && s.a[y] != 0)
                        out.push_back(w + ": magnitude " + std::to_string(s.a[y]) + " with flag 0 at station " +
                                      std::to_string(y + 1));
                }
            }
        }
        // a station free of shortfall stays free along the path
        if (shapes_ok && !tree.masked_propagation && slot.shortfall.size() >= 2 && !slot.demand.empty()) {
            const int zmax = static_cast<int>(slot.shortfall.size()) + 2;
            for (int stage = 4; stage <= zmax; ++stage) {
                const long long n = prefix_count(slot, stage);
                for (long long id = 0; id < n; ++id) {
                    const auto idx = decode_prefix(slot, stage, id);
                    const auto& prev = slot.shortfall[stage - 4][idx[stage - 3]];
                    const auto& cur = slot.shortfall[stage - 3][idx[stage - 2]];
                    for (std::size_t y = 0; y < ny; ++y) {
                        if (prev.f[y] == 0 && cur.f[y] == 1) {
                            std::string path = "lambda" + std::to_string(idx[0]);
                            for (std::size_t k = 1; k < idx.size(); ++k)
                                path += "/omega" + std::to_string(k + 2) + "_" + std::to_string(idx[k]);
                            out.push_back(st + " path " + path + ": station " + std::to_string(y + 1) +
                                          " has a shortfall at stage " + std::to_string(stage) +
                                          " after none at stage " + std::to_string(stage - 1));
                        }
                    }
                }
            }
        }
    }
    return out;
}

void require_valid(const ScenarioTree& tree) {
    const auto v = validate_tree(tree);
    if (v.empty())
        return;
    std::string msg = "invalid scenario tree:";
    for (const auto& s : v)
        msg += "\n  " + s;
    throw InputError(msg);
}

long long prefix_count(const SlotScenarios& slot, int stage) {
    long long n = static_cast<long long>(slot.demand.size());
    for (int j = 3; j <= stage; ++j)
        n *= static_cast<long long>(slot.shortfall.at(j - 3).size());
    return n;
}

std::vector<int> decode_prefix(const SlotScenarios& slot, int stage, long long id) {
    std::vector<int> idx(static_cast<std::size_t>(stage - 1));
    for (int j = stage; j >= 3; --j) {
        const long long w = static_cast<long long>(slot.shortfall.at(j - 3).size());
        idx[j - 2] = static_cast<int>(id % w);
        id /= w;
    }
    idx[0] = static_cast<int>(id);
    return idx;
}

double prefix_probability(const SlotScenarios& slot, int stage, long long id) {
    const auto idx = decode_prefix(slot, stage, id);
    double p = slot.demand.at(idx[0]).p;
    for (int j = 3; j <= stage; ++j)
        p *= slot.shortfall[j - 3][idx[j - 2]].p;
    return p;
}

int path_flag(const SlotScenarios& slot, int stage, long long id, int station) {
    const auto idx = decode_prefix(slot, stage, id);
    int f = 1;
    for (int j = 3; j <= stage; ++j)
        f *= slot.shortfall[j - 3][idx[j - 2]].f.at(station);
    return f;
}

long long path_loss(const SlotScenarios& slot, int stage, long long id, int station) {
    if (stage < 3)
        return 0;
    const int f = path_flag(slot, stage, id, station);
    if (!f)
        return 0;
    const auto idx = decode_prefix(slot, stage, id);
    return slot.shortfall[stage - 3][idx[stage - 2]].a.at(station);
}

DemandHistogram demand_hist_from_csv(const std::vector<DimRow>& rows) {
    if (rows.empty())
        throw InputError("demand CSV has no records");
    std::map<long long, long long> counts;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const long long line = r.line ? r.line : static_cast<long long>(i + 2);
        if (r.rows <= 0 || r.cols <= 0)
            throw InputError("line " + std::to_string(line) + ": dimensions must be positive");
        if (r.rows != r.cols)
            throw InputError("line " + std::to_string(line) + ": non-square matrix " + std::to_string(r.rows) +
                             "x" + std::to_string(r.cols));
        ++counts[r.rows];
    }
    DemandHistogram h;
    const double total = static_cast<double>(rows.size());
    for (const auto& [v, c] : counts) {
        h.values.push_back(v);
        h.counts.push_back(c);
        h.probabilities.push_back(static_cast<double>(c) / total);
    }
    return h;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long long parse_dim(const std::string& s, long long line) {
    const std::string t = trim(s);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        throw InputError("line " + std::to_string(line) + ": '" + t + "' is not a positive integer");
    try {
        return std::stoll(t);
    } catch (const std::exception&) {
        throw InputError("line " + std::to_string(line) + ": '" + t + "' is out of range");
    }
}

} // namespace

std::vector<DimRow> read_dim_csv(std::istream& in) {
    std::string line;
    long long no = 0;
    bool header = false;
    std::vector<DimRow> out;
    while (std::getline(in, line)) {
        ++no;
        if (no == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
            static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
            line.erase(0, 3);
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (!header) {
            std::string h;
            for (char c : t)
                if (c != ' ')
                    h += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (h != "rows,cols")
                throw InputError("line " + std::to_string(no) + ": expected header 'rows,cols'");
            header = true;
            continue;
        }
        const auto comma = t.find(',');
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
            throw InputError("line " + std::to_string(no) + ": expected two comma-separated fields");
        DimRow r;
        r.rows = parse_dim(t.substr(0, comma), no);
        r.cols = parse_dim(t.substr(comma + 1), no);
        r.line = no;
        out.push_back(r);
    }
    if (!header)
        throw InputError("demand CSV is empty (missing 'rows,cols' header)");
    return out;
}

ModelSize model_size_phase1(long long t, long long y, long long x, long long mu) {
    if (t < 1 || y < 1 || x < 1 || mu < 1)
        throw InputError("model_size_phase1: all counts must be >= 1");
    return {t * y * x + mu * t * y, t * y + 2 * mu * t * y + t * y * x};
}

namespace {

void check_phase2_counts(long long t, long long f, long long y, long long lambda,
                         const std::vector<long long>& omegas) {
    if (t < 1 || f < 1 || y < 1 || lambda < 1)
        throw InputError("model_size_phase2: all counts must be >= 1");
    for (long long w : omegas)
        if (w < 1)
            throw InputError("model_size_phase2: all counts must be >= 1");
}

} // namespace

ModelSize model_size_phase2(long long t, long long f, long long y, long long lambda,
                            const std::vector<long long>& omegas) {
    check_phase2_counts(t, f, y, lambda, omegas);
    ModelSize s;
    s.variables = t * f + t * lambda * y * f;
    for (long long w : omegas)
        s.variables += t * w * y * f;

    // chain[j] = lambda * omega3 * ... * omega_{j+3}
    std::vector<long long> chain;
    long long prod = lambda;
    for (long long w : omegas) {
        prod *= w;
        chain.push_back(prod);
    }
    long long c = 0;
    long long a = t * f * lambda;
    for (long long p : chain)
        a += t * f * p;
    c += 2 * a;
    long long b = 0;
    for (long long p : chain)
        b += t * y * f * p;
    c += 2 * b;
    for (long long p : chain)
        c += t * y * p;
    c += t * y * f * lambda;
    if (!chain.empty())
        c += 2 * t * y * f * chain.back();
    s.constraints = c;
    return s;
}

ModelSize model_size_phase2_extensive(long long t, long long f, long long y, long long lambda,
                                      const std::vector<long long>& omegas) {
    check_phase2_counts(t, f, y, lambda, omegas);
    long long s2 = lambda, s3 = 0, s4 = 0, p = lambda;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        p *= omegas[i];
        s2 += p;
        s3 += p;
        if (i >= 1)
            s4 += p;
    }
    const long long vars = f + y * (1 + 2 * f) * s2 + y * s3;
    const long long rows = 2 * f * s2 + y * f * s2 + y * lambda + 2 * y * s3 + y * f * s3 + y * s4;
    const long long bins = f + y * f * s2 + y * s3;
    return {t * vars, t * (rows + bins)};
}

} // namespace scos
