#include "qkdsec/serialize.h"

#include "qkdsec/errors.h"

namespace qkdsec {

namespace {

std::vector<double> flat_reals(const nlohmann::json &arr, std::size_t n, const char *field) {
    if (!arr.is_array()) throw ValidationError(std::string("matrix: '") + field + "' must be an array");
    std::vector<double> out;
    out.reserve(n * n);
    if (!arr.empty() && arr.front().is_array()) {
        if (arr.size() != n) throw ValidationError(std::string("matrix: '") + field + "' has wrong row count");
        for (const auto &row : arr) {
            if (!row.is_array() || row.size() != n) {
                throw ValidationError(std::string("matrix: '") + field + "' has a row of wrong length");
            }
            for (const auto &x : row) out.push_back(x.get<double>());
        }
    } else {
        if (arr.size() != n * n) throw ValidationError(std::string("matrix: '") + field + "' must hold dim^2 values");
        for (const auto &x : arr) out.push_back(x.get<double>());
    }
    return out;
}

template <typename F>
auto wrap_json_errors(const char *what, F &&f) {
    try {
        return f();
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

nlohmann::json to_json(const HermitianOperator &m) {
    const std::size_t n = m.dim();
    std::vector<double> re(n * n), im(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            re[r * n + c] = m(r, c).real();
            im[r * n + c] = m(r, c).imag();
        }
    }
    return {{"dim", n}, {"re", re}, {"im", im}};
}

HermitianOperator operator_from_json(const nlohmann::json &doc, const Config &cfg) {
    return wrap_json_errors("matrix document", [&] {
        const auto n = doc.at("dim").get<std::size_t>();
        if (n == 0) throw ValidationError("matrix: dim must be >= 1");
        if (n > cfg.dim_cap) throw ResourceError("matrix: dim " + std::to_string(n) + " exceeds cap");
        const auto re = flat_reals(doc.at("re"), n, "re");
        std::vector<double> im(n * n, 0.0);
        if (doc.contains("im")) im = flat_reals(doc.at("im"), n, "im");
        std::vector<cplx> data(n * n);
        for (std::size_t i = 0; i < n * n; ++i) data[i] = cplx(re[i], im[i]);
        return HermitianOperator(CMatrix(n, n, std::move(data)), cfg);
    });
}

nlohmann::json to_json(const CqState &s) {
    nlohmann::json branches = nlohmann::json::array();
    for (const auto &b : s.branches()) {
        branches.push_back({{"ka", b.key_a}, {"kb", b.key_b}, {"p", b.prob}, {"eve_op", to_json(b.eve_op)}});
    }
    return {{"bits", s.keys().bits()}, {"eve_dim", s.eve_dim()}, {"branches", branches}};
}

CqState cq_state_from_json(const nlohmann::json &doc, const Config &cfg) {
    return wrap_json_errors("cq-state document", [&] {
        const KeySpace keys(doc.at("bits").get<unsigned>(), cfg);
        const auto eve_dim = doc.at("eve_dim").get<std::size_t>();
        std::vector<CqBranch> branches;
        for (const auto &b : doc.at("branches")) {
            branches.push_back({b.at("ka").get<std::size_t>(), b.at("kb").get<std::size_t>(), b.at("p").get<double>(),
                                operator_from_json(b.at("eve_op"), cfg)});
        }
        return CqState(keys, eve_dim, std::move(branches), cfg);
    });
}

nlohmann::json to_json(const Povm &m) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &el : m.elements()) out.push_back({{"label", el.label}, {"op", to_json(el.op)}});
    return out;
}

Povm povm_from_json(const nlohmann::json &doc, const Config &cfg) {
    return wrap_json_errors("POVM document", [&] {
        if (!doc.is_array()) throw ValidationError("POVM document must be an array");
        std::vector<PovmElement> elements;
        for (const auto &el : doc) {
            elements.push_back({el.at("label").get<std::size_t>(), operator_from_json(el.at("op"), cfg)});
        }
        return Povm(std::move(elements), cfg);
    });
}

ClassicalDistribution distribution_from_json(const nlohmann::json &doc, const Config &cfg) {
    return wrap_json_errors("distribution", [&] {
        if (!doc.is_array()) throw ValidationError("distribution must be a numeric array");
        return ClassicalDistribution(doc.get<std::vector<double>>(), cfg);
    });
}

}  // namespace qkdsec
