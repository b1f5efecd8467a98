#include <sstream>

#include "phigamma/herr.hpp"

namespace phigamma {

namespace {

std::string mat_to_text(const PhiGammaModule& M, const PhiGammaModule::Mat& mat) {
    std::ostringstream os;
    os << "[ ";
    for (size_t i = 0; i < mat.size(); ++i) {
        if (i) os << " ; ";
        for (size_t j = 0; j < mat[i].size(); ++j) {
            if (j) os << " | ";
            if (M.base == BaseRing::AL)
                os << mat[i][j].str();
            else
                os << mat[i][j].reduce_mod_pi().str();
        }
    }
    os << " ]";
    return os.str();
}

PhiGammaModule::Mat mat_from_text(const PhiGammaModule& M, const std::string& text) {
    auto lb = text.find('[');
    auto rb = text.rfind(']');
    if (lb == std::string::npos || rb == std::string::npos || rb <= lb)
        throw std::invalid_argument("matrix must be bracketed: " + text);
    std::string body = text.substr(lb + 1, rb - lb - 1);
    PhiGammaModule::Mat mat;
    std::vector<std::string> rows;
    {
        std::string cur;
        for (char ch : body) {
            if (ch == ';') {
                rows.push_back(cur);
                cur.clear();
            } else
                cur += ch;
        }
        rows.push_back(cur);
    }
    for (const auto& row_text : rows) {
        std::vector<LaurentSeriesAL> row;
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : row_text) {
            if (ch == '|') {
                cells.push_back(cur);
                cur.clear();
            } else
                cur += ch;
        }
        cells.push_back(cur);
        for (const auto& cell : cells) {
            if (M.base == BaseRing::AL) {
                row.push_back(LaurentSeriesAL::parse(M.F, M.m, cell, -LaurentSeriesAL::kExactWindow,
                                                     LaurentSeriesAL::kExactWindow));
            } else {
                LaurentSeriesFq s = LaurentSeriesFq::parse(M.F->residue_field(), M.F->q(), cell,
                                                           -LaurentSeriesAL::kExactWindow,
                                                           LaurentSeriesAL::kExactWindow);
                row.push_back(LaurentSeriesAL::teichmueller_lift(s, M.F, 1));
            }
        }
        mat.push_back(std::move(row));
    }
    return mat;
}

}  // namespace

std::string PhiGammaModule::str() const {
    std::ostringstream os;
    os << "rank = " << rank << "\n";
    os << "base = ";
    if (base == BaseRing::EL) os << "E";
    else if (base == BaseRing::EPerf) os << "Eperf:" << perf_level;
    else os << "AL:" << m;
    os << "\n";
    os << "window = [" << profile.v_min << ", " << profile.N << ")\n";
    os << "phi = " << mat_to_text(*this, phi_mat) << "\n";
    for (const auto& [a, mat] : gammas) os << "gamma " << a << " = " << mat_to_text(*this, mat) << "\n";
    for (const auto& [a, mat] : deltas) os << "delta " << a << " = " << mat_to_text(*this, mat) << "\n";
    return os.str();
}

PhiGammaModule PhiGammaModule::parse(const LocalFieldPtr& F, const std::string& text) {
    PhiGammaModule M;
    M.F = F;
    std::istringstream in(text);
    std::string line;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        size_t b = s.find_last_not_of(" \t\r\n");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::vector<std::pair<std::string, std::string>> entries;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        entries.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
    }
    // first pass: scalars
    for (const auto& [key, val] : entries) {
        if (key == "rank") M.rank = std::stoi(val);
        else if (key == "base") {
            if (val == "E") M.base = BaseRing::EL;
            else if (val.rfind("Eperf:", 0) == 0) {
                M.base = BaseRing::EPerf;
                M.perf_level = std::stoi(val.substr(6));
            } else if (val.rfind("AL:", 0) == 0) {
                M.base = BaseRing::AL;
                M.m = std::stoi(val.substr(3));
            } else
                throw std::invalid_argument("unknown base: " + val);
        } else if (key == "window") {
            auto lb = val.find('[');
            auto comma = val.find(',');
            auto rb = val.find_first_of("])", comma);
            if (lb == std::string::npos || comma == std::string::npos || rb == std::string::npos)
                throw std::invalid_argument("window must look like [v_min, N)");
            M.profile.v_min = std::stoll(val.substr(lb + 1, comma - lb - 1));
            M.profile.N = std::stoll(val.substr(comma + 1, rb - comma - 1));
        }
    }
    // second pass: matrices (need base/rank fixed first)
    for (const auto& [key, val] : entries) {
        if (key == "phi") M.phi_mat = mat_from_text(M, val);
        else if (key.rfind("gamma ", 0) == 0)
            M.gammas.push_back({std::stoll(key.substr(6)), mat_from_text(M, val)});
        else if (key.rfind("delta ", 0) == 0)
            M.deltas.push_back({std::stoll(key.substr(6)), mat_from_text(M, val)});
    }
    M.validate();
    return M;
}

}  // namespace phigamma
