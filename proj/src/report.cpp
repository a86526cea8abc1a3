#include "dequant/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

namespace dequant
{
    namespace
    {
        std::string number(double value)
        {
            if (std::isnan(value))
            {
                return "nan";
            }
            if (std::isinf(value))
            {
                return value > 0 ? "inf" : "-inf";
            }
            char buf[64];
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
            return std::string(buf, ptr);
        }

        std::string csv_field(const std::string& text)
        {
            if (text.find_first_of(",\"\n") == std::string::npos)
            {
                return text;
            }
            std::string out = "\"";
            for (char ch : text)
            {
                if (ch == '"')
                {
                    out += '"';
                }
                out += ch;
            }
            out += '"';
            return out;
        }

        // JSON has no infinity or NaN; those become strings.
        nlohmann::json json_number(double value)
        {
            if (std::isfinite(value))
            {
                return value;
            }
            return number(value);
        }

        double number_from_json(const nlohmann::json& j)
        {
            if (j.is_string())
            {
                const auto s = j.get<std::string>();
                if (s == "inf")
                {
                    return std::numeric_limits<double>::infinity();
                }
                if (s == "-inf")
                {
                    return -std::numeric_limits<double>::infinity();
                }
                return std::numeric_limits<double>::quiet_NaN();
            }
            return j.get<double>();
        }

        std::size_t algorithm_rank(Algorithm a)
        {
            for (std::size_t i = 0; i < kAllAlgorithms.size(); ++i)
            {
                if (kAllAlgorithms[i] == a)
                {
                    return i;
                }
            }
            return kAllAlgorithms.size();
        }
    }  // namespace

    ReportFormat parse_report_format(std::string_view name)
    {
        if (name == "csv")
        {
            return ReportFormat::Csv;
        }
        if (name == "json")
        {
            return ReportFormat::Json;
        }
        throw InvalidArgument("unknown report format '" + std::string(name) + "' (expected csv or json)");
    }

    std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows)
    {
        std::map<std::tuple<std::size_t, int, std::size_t>, std::pair<double, std::size_t>> groups;
        for (const auto& row : rows)
        {
            if (row.failed)
            {
                continue;
            }
            auto& [sum, count] = groups[{algorithm_rank(row.algorithm), row.w, row.iterations}];
            sum += row.delta_sdr;
            ++count;
        }
        std::vector<SummaryRow> out;
        for (const auto& [key, acc] : groups)
        {
            const auto& [rank, w, iterations] = key;
            out.push_back(SummaryRow{kAllAlgorithms[rank], w, iterations, acc.first / static_cast<double>(acc.second),
                                     acc.second});
        }
        return out;
    }

    std::string csv_line(const ResultRow& row)
    {
        std::string params = row.params;
        if (row.failed)
        {
            params += (params.empty() ? "" : ";") + std::string("error=") + row.error;
        }
        std::string line;
        line += csv_field(row.input) + ',';
        line += std::to_string(row.w) + ',';
        line += std::string(algorithm_id(row.algorithm)) + ',';
        line += std::to_string(row.iterations) + ',';
        line += number(row.delta_sdr) + ',';
        line += number(row.sdr) + ',';
        line += std::string(row.consistent ? "true" : "false") + ',';
        line += number(row.wall_time) + ',';
        line += csv_field(params);
        return line;
    }

    void write_csv(std::ostream& out, const std::vector<ResultRow>& rows)
    {
        out << kCsvHeader << '\n';
        for (const auto& row : rows)
        {
            out << csv_line(row) << '\n';
        }
    }

    void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary)
    {
        out << "algorithm,w,iterations,mean_delta_sdr_db,count,mean_odg\n";
        for (const auto& s : summary)
        {
            out << algorithm_id(s.algorithm) << ',' << s.w << ',' << s.iterations << ',' << number(s.mean_delta_sdr)
                << ',' << s.count << ",\n";
        }
    }

    nlohmann::json to_json(const std::vector<ResultRow>& rows, const std::vector<SummaryRow>& summary)
    {
        nlohmann::json j;
        j["rows"] = nlohmann::json::array();
        for (const auto& row : rows)
        {
            nlohmann::json r;
            r["input"] = row.input;
            r["w"] = row.w;
            r["algorithm"] = algorithm_id(row.algorithm);
            r["iterations"] = row.iterations;
            r["delta_sdr_db"] = json_number(row.delta_sdr);
            r["sdr_db"] = json_number(row.sdr);
            r["consistent"] = row.consistent;
            r["wall_time_s"] = row.wall_time;
            r["params"] = row.params;
            r["failed"] = row.failed;
            if (row.failed)
            {
                r["error"] = row.error;
            }
            r["odg"] = row.odg ? nlohmann::json(*row.odg) : nlohmann::json(nullptr);
            j["rows"].push_back(std::move(r));
        }
        j["summary"] = nlohmann::json::array();
        for (const auto& s : summary)
        {
            j["summary"].push_back({{"algorithm", algorithm_id(s.algorithm)},
                                    {"w", s.w},
                                    {"iterations", s.iterations},
                                    {"mean_delta_sdr_db", json_number(s.mean_delta_sdr)},
                                    {"count", s.count}});
        }
        return j;
    }

    std::vector<SummaryRow> summary_from_json(const nlohmann::json& j)
    {
        std::vector<SummaryRow> out;
        for (const auto& s : j.at("summary"))
        {
            const auto id = s.at("algorithm").get<std::string>();
            const auto a = parse_algorithm(id);
            require(a.has_value(), "summary: unknown algorithm '" + id + "'");
            out.push_back(SummaryRow{*a, s.at("w").get<int>(), s.at("iterations").get<std::size_t>(),
                                     number_from_json(s.at("mean_delta_sdr_db")), s.at("count").get<std::size_t>()});
        }
        return out;
    }

    std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& rows, ReportFormat format,
                                                   const std::filesystem::path& directory, const std::string& stem)
    {
        require(!rows.empty(), "emit_report: no rows");
        std::filesystem::create_directories(directory);
        const auto summary = summarize(rows);
        const auto open = [](const std::filesystem::path& path) {
            std::ofstream out(path);
            if (!out)
            {
                throw std::runtime_error("cannot open " + path.string() + " for writing");
            }
            return out;
        };

        if (format == ReportFormat::Json)
        {
            const auto path = directory / (stem + ".json");
            auto out = open(path);
            out << to_json(rows, summary).dump(2) << '\n';
            return {path};
        }
        const auto rows_path = directory / (stem + ".csv");
        const auto summary_path = directory / (stem + "_summary.csv");
        {
            auto out = open(rows_path);
            write_csv(out, rows);
        }
        {
            auto out = open(summary_path);
            write_summary_csv(out, summary);
        }
        return {rows_path, summary_path};
    }
}  // namespace dequant
