#include "swelab/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace swelab {

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(std::numeric_limits<double>::max_digits10);
    ss << v;
    return ss.str();
}

void write_csv(std::ostream& os, const std::vector<FieldSample>& samples) {
    os << "replication_id,tau,lambda,value\n";
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < s.grid.tau_values.size(); ++i) {
            for (std::size_t j = 0; j < s.grid.lambda_values.size(); ++j) {
                os << s.replication_id << ',' << format_double(s.grid.tau_values[i])
                   << ',' << format_double(s.grid.lambda_values[j]) << ','
                   << format_double(s.values(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(j)))
                   << '\n';
            }
        }
    }
}

void write_binary(std::ostream& os, const FieldSample& sample, double beta) {
    nlohmann::json header;
    header["dims"] = {sample.grid.tau_values.size(), sample.grid.lambda_values.size()};
    header["tau_values"] = sample.grid.tau_values;
    header["lambda_values"] = sample.grid.lambda_values;
    header["seed"] = sample.seed;
    header["replication_id"] = sample.replication_id;
    header["beta"] = beta;
    if (sample.grid.band) {
        header["band"]["s_lo"] = sample.grid.band->s_lo;
        // JSON cannot carry infinity; an absent s_hi means an unbounded band
        if (std::isfinite(sample.grid.band->s_hi)) {
            header["band"]["s_hi"] = sample.grid.band->s_hi;
        }
    } else {
        header["band"] = nullptr;
    }
    const std::string h = header.dump();
    const std::uint32_t len = static_cast<std::uint32_t>(h.size());
    os.write("SWEB", 4);
    char lenbuf[4];
    std::memcpy(lenbuf, &len, 4);
    os.write(lenbuf, 4);
    os.write(h.data(), static_cast<std::streamsize>(h.size()));
    // Eigen matrices are column-major by default; dump the buffer directly
    os.write(reinterpret_cast<const char*>(sample.values.data()),
             static_cast<std::streamsize>(sizeof(double) * sample.values.size()));
}

FieldSample read_binary(std::istream& is, double& beta_out) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SWEB", 4) != 0) {
        throw std::runtime_error("read_binary: bad magic");
    }
    std::uint32_t len = 0;
    char lenbuf[4];
    is.read(lenbuf, 4);
    std::memcpy(&len, lenbuf, 4);
    std::string h(len, '\0');
    is.read(h.data(), len);
    if (!is) throw std::runtime_error("read_binary: truncated header");
    const auto header = nlohmann::json::parse(h);

    FieldSample s;
    s.grid.tau_values = header.at("tau_values").get<std::vector<double>>();
    s.grid.lambda_values = header.at("lambda_values").get<std::vector<double>>();
    if (!header.at("band").is_null()) {
        const double lo = header["band"].at("s_lo").get<double>();
        const double hi = header["band"].contains("s_hi")
                              ? header["band"]["s_hi"].get<double>()
                              : std::numeric_limits<double>::infinity();
        s.grid.band = TimeBand(lo, hi);
    }
    s.seed = header.at("seed").get<std::uint64_t>();
    s.replication_id = header.at("replication_id").get<std::uint64_t>();
    beta_out = header.at("beta").get<double>();

    const auto nt = static_cast<Eigen::Index>(s.grid.tau_values.size());
    const auto nl = static_cast<Eigen::Index>(s.grid.lambda_values.size());
    s.values.resize(nt, nl);
    is.read(reinterpret_cast<char*>(s.values.data()),
            static_cast<std::streamsize>(sizeof(double) * s.values.size()));
    if (!is) throw std::runtime_error("read_binary: truncated payload");
    return s;
}

} // namespace swelab
