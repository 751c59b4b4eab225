#include "scp/concrete.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "scp/philox.hpp"

namespace scp {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

// First header whose lowercase form contains the keyword; -1 when absent.
int find_column(const std::vector<std::string>& headers, const std::string& keyword) {
    for (std::size_t i = 0; i < headers.size(); ++i)
        if (lower(headers[i]).find(keyword) != std::string::npos) return static_cast<int>(i);
    return -1;
}

}  // namespace

std::vector<ConcreteRecord> load_concrete_csv(const std::string& path, double age_lo,
                                              double age_hi, double r_lo, double r_hi) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open dataset file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("dataset file is empty");
    const std::vector<std::string> headers = split_csv_line(line);

    const int c_cement = find_column(headers, "cement");
    const int c_slag = find_column(headers, "slag");
    const int c_ash = find_column(headers, "ash");
    const int c_water = find_column(headers, "water");
    const int c_age = find_column(headers, "age");
    const int c_strength = find_column(headers, "strength");
    if (c_cement < 0 || c_slag < 0 || c_ash < 0 || c_water < 0 || c_age < 0 || c_strength < 0)
        throw SchemaError(
            "dataset must carry cement, slag, ash, water, age and strength columns");

    std::vector<ConcreteRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv_line(line);
        const int needed = std::max({c_cement, c_slag, c_ash, c_water, c_age, c_strength});
        if (static_cast<int>(f.size()) <= needed)
            throw SchemaError("short row at line " + std::to_string(line_no));
        ConcreteRecord r;
        try {
            r.cement = std::stod(f[c_cement]);
            r.slag = std::stod(f[c_slag]);
            r.fly_ash = std::stod(f[c_ash]);
            r.water = std::stod(f[c_water]);
            r.age = std::stod(f[c_age]);
            r.strength = std::stod(f[c_strength]);
        } catch (const std::exception&) {
            throw SchemaError("non-numeric field at line " + std::to_string(line_no));
        }
        if (!(r.strength > 0.0) || r.age < 0.0 || !(r.binder() > 0.0))
            throw SchemaError("invalid record at line " + std::to_string(line_no));
        const double ratio = r.water_binder_ratio();
        if (r.age >= age_lo && r.age <= age_hi && ratio >= r_lo && ratio <= r_hi)
            out.push_back(r);
    }
    if (out.empty()) throw EmptyFilterError("no records match the age and ratio filters");
    return out;
}

std::vector<double> bootstrap_noise(const std::vector<ConcreteRecord>& records,
                                    std::size_t count, double noise_sd, std::uint64_t seed) {
    if (records.empty()) throw std::invalid_argument("bootstrap requires records");
    std::vector<double> draws(count);
    const std::size_t n = records.size();
    for (std::size_t i = 0; i < count; ++i) {
        PhiloxStream stream(seed, i);
        std::size_t j = static_cast<std::size_t>(stream.next_double() * static_cast<double>(n));
        if (j >= n) j = n - 1;
        draws[i] = records[j].strength + noise_sd * stream.next_normal();
    }
    return draws;
}

}  // namespace scp
