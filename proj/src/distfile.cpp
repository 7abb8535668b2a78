#include "pidchan/distfile.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>

namespace pidchan {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::vector<std::string> split_fields(const std::string& raw) {
    std::string line = raw.substr(0, raw.find('#'));
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(f);
    return fields;
}

double parse_number(const std::string& s, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
        throw ParseError(line, "invalid number '" + s + "'");
    }
    return v;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Renormalizes values summing to 1 within kSumTolerance; exact sums are kept.
void normalize(std::vector<double>& v, std::size_t line, const char* what) {
    double total = 0.0;
    for (double x : v) total += x;
    if (std::abs(total - 1.0) > kSumTolerance) {
        throw ParseError(line, std::string(what) + " sums to " + format_number(total));
    }
    if (std::abs(total - 1.0) > 1e-12) {
        for (double& x : v) x /= total;
    }
}

}  // namespace

DistributionFile read_distribution(std::istream& in) {
    std::vector<std::string> names;
    std::map<std::string, std::vector<std::string>> declared;
    std::vector<std::pair<std::vector<std::string>, std::pair<double, std::size_t>>> records;
    std::string raw;
    std::size_t lineno = 0, vars_line = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto f = split_fields(raw);
        if (f.empty()) continue;
        if (f[0] == "@vars") {
            if (!names.empty()) throw ParseError(lineno, "duplicate @vars header");
            if (f.size() < 3) throw ParseError(lineno, "@vars needs a target and at least one source");
            names.assign(f.begin() + 1, f.end());
            vars_line = lineno;
        } else if (f[0] == "@alphabet") {
            if (f.size() < 3) throw ParseError(lineno, "@alphabet needs a name and symbols");
            if (!declared.emplace(f[1], std::vector<std::string>(f.begin() + 2, f.end())).second) {
                throw ParseError(lineno, "duplicate @alphabet for " + f[1]);
            }
        } else if (f[0][0] == '@') {
            throw ParseError(lineno, "unknown directive " + f[0]);
        } else {
            if (names.empty()) throw ParseError(lineno, "record before @vars header");
            if (f.size() != names.size() + 1) {
                throw ParseError(lineno, "expected " + std::to_string(names.size() + 1) + " fields");
            }
            const double p = parse_number(f.back(), lineno);
            if (p < 0.0) throw ParseError(lineno, "negative probability");
            records.push_back({std::vector<std::string>(f.begin(), f.end() - 1), {p, lineno}});
        }
    }
    if (names.empty()) throw ParseError(lineno, "missing @vars header");
    if (records.empty()) throw ParseError(lineno, "no records");

    std::vector<std::vector<std::string>> labels(names.size());
    for (std::size_t a = 0; a < names.size(); ++a) {
        auto it = declared.find(names[a]);
        if (it != declared.end()) {
            labels[a] = it->second;
            declared.erase(it);
        }
    }
    if (!declared.empty()) throw ParseError(vars_line, "@alphabet for undeclared variable " + declared.begin()->first);
    const std::vector<bool> fixed = [&] {
        std::vector<bool> v(names.size());
        for (std::size_t a = 0; a < names.size(); ++a) v[a] = !labels[a].empty();
        return v;
    }();
    for (const auto& [tuple, rec] : records) {
        for (std::size_t a = 0; a < names.size(); ++a) {
            auto& l = labels[a];
            if (std::find(l.begin(), l.end(), tuple[a]) != l.end()) continue;
            if (fixed[a]) throw ParseError(rec.second, "symbol '" + tuple[a] + "' not in alphabet of " + names[a]);
            l.push_back(tuple[a]);
        }
    }
    std::vector<Alphabet> axes;
    std::size_t total = 1;
    try {
        for (auto& l : labels) {
            axes.emplace_back(l);
            total *= l.size();
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError(vars_line, e.what());
    }
    std::vector<double> probs(total, 0.0);
    std::vector<bool> filled(total, false);
    for (const auto& [tuple, rec] : records) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < names.size(); ++a) flat = flat * axes[a].size() + *axes[a].index_of(tuple[a]);
        if (filled[flat]) throw ParseError(rec.second, "duplicate outcome tuple");
        filled[flat] = true;
        probs[flat] = rec.first;
    }
    normalize(probs, lineno, "distribution");
    return DistributionFile{std::move(names), JointTable(std::move(axes), std::move(probs))};
}

DistributionFile parse_distribution(const std::string& text) {
    std::istringstream in(text);
    return read_distribution(in);
}

std::string write_distribution(const JointTable& table, const std::vector<std::string>& names) {
    std::vector<std::string> vars = names;
    if (vars.empty()) {
        vars.push_back("T");
        for (std::size_t a = 1; a < table.rank(); ++a) vars.push_back("Y" + std::to_string(a));
    }
    if (vars.size() != table.rank()) throw std::invalid_argument("write_distribution: name count mismatch");
    std::ostringstream out;
    out << "@vars";
    for (const auto& v : vars) out << '\t' << v;
    out << '\n';
    for (std::size_t a = 0; a < table.rank(); ++a) {
        out << "@alphabet\t" << vars[a];
        for (const auto& l : table.axes()[a].labels()) out << '\t' << l;
        out << '\n';
    }
    for (std::size_t f = 0; f < table.probs().size(); ++f) {
        if (table.probs()[f] == 0.0) continue;
        const auto idx = table.unflatten(f);
        for (std::size_t a = 0; a < table.rank(); ++a) out << table.axes()[a].label(idx[a]) << '\t';
        out << format_number(table.probs()[f]) << '\n';
    }
    return out.str();
}

std::vector<NamedChannel> read_channels(std::istream& in) {
    struct Block {
        std::string name;
        std::size_t line;
        std::vector<std::vector<double>> rows;
    };
    std::vector<Block> blocks;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto f = split_fields(raw);
        if (f.empty()) continue;
        if (f[0] == "@channel") {
            if (f.size() != 2) throw ParseError(lineno, "@channel needs exactly one name");
            blocks.push_back({f[1], lineno, {}});
            continue;
        }
        if (f[0][0] == '@') throw ParseError(lineno, "unknown directive " + f[0]);
        if (blocks.empty()) throw ParseError(lineno, "row before @channel header");
        std::vector<double> row;
        for (const auto& s : f) {
            const double v = parse_number(s, lineno);
            if (v < 0.0) throw ParseError(lineno, "negative entry");
            row.push_back(v);
        }
        auto& rows = blocks.back().rows;
        if (!rows.empty() && rows.front().size() != row.size()) throw ParseError(lineno, "ragged channel rows");
        normalize(row, lineno, "channel row");
        rows.push_back(std::move(row));
    }
    if (blocks.empty()) throw ParseError(lineno, "no @channel blocks");
    std::vector<NamedChannel> out;
    for (auto& b : blocks) {
        if (b.rows.empty()) throw ParseError(b.line, "channel " + b.name + " has no rows");
        out.push_back({b.name, Channel::from_rows(b.rows)});
    }
    return out;
}

std::vector<NamedChannel> parse_channels(const std::string& text) {
    std::istringstream in(text);
    return read_channels(in);
}

std::string write_channels(const std::vector<NamedChannel>& channels) {
    std::ostringstream out;
    for (std::size_t k = 0; k < channels.size(); ++k) {
        if (k) out << '\n';
        out << "@channel\t" << channels[k].name << '\n';
        const Channel& K = channels[k].channel;
        for (std::size_t x = 0; x < K.num_inputs(); ++x) {
            for (std::size_t y = 0; y < K.num_outputs(); ++y) out << (y ? "\t" : "") << format_number(K(x, y));
            out << '\n';
        }
    }
    return out.str();
}

bool looks_like_channel_file(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        const auto f = split_fields(raw);
        if (!f.empty()) return f[0] == "@channel";
    }
    return false;
}

}  // namespace pidchan
