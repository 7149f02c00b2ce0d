#include "qkdsec/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "qkdsec/errors.h"

namespace qkdsec {

MetricReport &MetricReport::add(std::string name, double value, std::string provenance, bool flagged) {
    if (contains(name)) throw ValidationError("MetricReport: duplicate entry name '" + name + "'");
    entries_.push_back({std::move(name), value, std::move(provenance), flagged});
    return *this;
}

MetricReport &MetricReport::merge(const MetricReport &other, std::string_view prefix) {
    for (const auto &e : other.entries_) add(std::string(prefix) + e.name, e.value, e.provenance, e.flagged);
    return *this;
}

bool MetricReport::contains(std::string_view name) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const ReportEntry &e) { return e.name == name; });
}

const ReportEntry &MetricReport::entry(std::string_view name) const {
    for (const auto &e : entries_) {
        if (e.name == name) return e;
    }
    throw std::out_of_range("MetricReport: no entry '" + std::string(name) + "'");
}

double MetricReport::value(std::string_view name) const { return entry(name).value; }

std::optional<ReportFormat> parse_report_format(std::string_view s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    return std::nullopt;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string emit_report(const MetricReport &r, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        std::string out = "name,value,provenance\n";
        for (const auto &e : r.entries()) {
            out += csv_field(e.name) + "," + format_double(e.value) + "," +
                   csv_field(e.flagged ? "FLAG: " + e.provenance : e.provenance) + "\n";
        }
        return out;
    }
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto &e : r.entries()) {
        nlohmann::ordered_json item;
        // JSON has no NaN/inf; those go out as strings.
        if (std::isfinite(e.value)) {
            item["value"] = e.value;
        } else {
            item["value"] = format_double(e.value);
        }
        item["provenance"] = e.provenance;
        if (e.flagged) item["flagged"] = true;
        doc[e.name] = std::move(item);
    }
    return doc.dump(2) + "\n";
}

MetricReport parse_report_json(std::string_view text) {
    const auto doc = nlohmann::ordered_json::parse(text);
    if (!doc.is_object()) throw ValidationError("report document must be a JSON object");
    MetricReport r;
    for (const auto &[name, item] : doc.items()) {
        const auto &v = item.at("value");
        double value;
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            value = s == "nan" ? std::nan("") : (s == "inf" ? INFINITY : -INFINITY);
        } else {
            value = v.get<double>();
        }
        r.add(name, value, item.at("provenance").get<std::string>(), item.value("flagged", false));
    }
    return r;
}

}  // namespace qkdsec
