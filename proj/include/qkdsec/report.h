#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qkdsec {

struct ReportEntry {
    std::string name;
    double value;
    /// Producing operation and inputs, e.g. "metrics.trace_distance(zeta, ideal)".
    std::string provenance;
    /// Marks values that disagree with a published figure or that are only
    /// bounds rather than exact optima.
    bool flagged = false;
};

/// Ordered named scalars. Names are unique; insertion order is preserved in
/// every serialization.
class MetricReport {
   public:
    MetricReport &add(std::string name, double value, std::string provenance, bool flagged = false);
    /// Appends every entry of `other`, prefixing names with `prefix`.
    MetricReport &merge(const MetricReport &other, std::string_view prefix = {});

    const std::vector<ReportEntry> &entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    bool contains(std::string_view name) const;
    /// Throws std::out_of_range for unknown names.
    double value(std::string_view name) const;
    const ReportEntry &entry(std::string_view name) const;

   private:
    std::vector<ReportEntry> entries_;
};

enum class ReportFormat { Json, Csv };

std::optional<ReportFormat> parse_report_format(std::string_view s);

/// JSON: one object keyed by entry name, each value {"value", "provenance"}
/// plus "flagged": true when set. CSV: header "name,value,provenance", one
/// row per entry, flagged provenance prefixed "FLAG: ". Doubles are printed in
/// shortest round-trip form.
std::string emit_report(const MetricReport &r, ReportFormat format);

/// Inverse of the JSON form of `emit_report`.
MetricReport parse_report_json(std::string_view text);

/// Shortest decimal that parses back to exactly `v`; non-finite values render
/// as "nan", "inf", "-inf".
std::string format_double(double v);

}  // namespace qkdsec
