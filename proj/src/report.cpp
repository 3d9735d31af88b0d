#include "rtg/report.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "rtg/errors.hpp"
#include "rtg/io.hpp"

namespace rtg::report {

using io::format_sci;

Metric metric_from_string(std::string_view s) {
    if (s == "r2") return Metric::r_squared;
    if (s == "rmse") return Metric::rmse;
    throw std::invalid_argument("unknown metric '" + std::string(s) + "'");
}

std::string_view to_string(Metric m) noexcept { return m == Metric::r_squared ? "r2" : "rmse"; }

std::string fits_csv(std::span<const SubjectFits> subjects) {
    std::string out = "subject,model,converged,R2,RMSE,iterations,starts_converged,params\n";
    for (const auto& s : subjects) {
        for (const auto& f : s.fits) {
            std::string params;
            for (std::size_t i = 0; i < f.params.size(); ++i) {
                if (i) params.push_back(' ');
                params += format_sci(f.params[i]);
            }
            out += io::quote_csv(s.subject) + "," + std::string(to_token(f.model)) + "," +
                   (f.converged ? "1" : "0") + "," + format_sci(f.r_squared) + "," +
                   format_sci(f.rmse) + "," + std::to_string(f.iterations) + "," +
                   std::to_string(f.starts_converged) + "," + params + "\n";
        }
    }
    return out;
}

std::vector<SubjectFits> parse_fits_csv(std::string_view text) {
    std::vector<SubjectFits> out;
    std::size_t line_no = 0;
    bool header = true;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        if (header) {
            if (line != "subject,model,converged,R2,RMSE,iterations,starts_converged,params")
                throw MalformedLog("fits table: unexpected header");
            header = false;
            continue;
        }
        const auto f = io::split_csv_line(line);
        if (f.size() != 8) throw MalformedLog("fits table line " + std::to_string(line_no));
        FitResult r;
        try {
            r.model = model_from_token(f[1]);
            r.converged = f[2] == "1";
            r.r_squared = std::stod(f[3]);
            r.rmse = std::stod(f[4]);
            r.iterations = std::stoi(f[5]);
            r.starts_converged = std::stoi(f[6]);
            std::size_t pos = 0;
            while (pos < f[7].size()) {
                auto end = f[7].find(' ', pos);
                if (end == std::string::npos) end = f[7].size();
                r.params.push_back(std::stod(f[7].substr(pos, end - pos)));
                pos = end + 1;
            }
        } catch (const std::invalid_argument&) {
            throw MalformedLog("fits table line " + std::to_string(line_no) + ": bad field");
        } catch (const std::out_of_range&) {
            throw MalformedLog("fits table line " + std::to_string(line_no) + ": value out of range");
        }
        if (out.empty() || out.back().subject != f[0]) out.push_back({f[0], {}});
        out.back().fits.push_back(std::move(r));
    }
    if (header) throw MalformedLog("fits table has no header");
    return out;
}

std::string ranking_csv(std::span<const SubjectFits> subjects, ModelId reference) {
    std::string out = "subject,ranking,R2_best,RMSE_best,deltaR2_ref,deltaRMSE_ref\n";
    int ranked = 0, first = 0, top_two = 0;
    for (const auto& s : subjects) {
        if (s.fits.empty()) continue;
        const auto ranking = make_ranking(s.fits, reference);
        std::string order;
        for (const auto& f : ranking.order) {
            if (!order.empty()) order.push_back(' ');
            order += to_token(f.model);
        }
        const auto& best = ranking.best();
        const FitResult* ref = ranking.find(reference);
        const double d_r2 = ref ? std::abs(best.r_squared - ref->r_squared) : std::nan("");
        const double d_rmse = ref ? std::abs(best.rmse - ref->rmse) : std::nan("");
        out += io::quote_csv(s.subject) + "," + order + "," + format_sci(best.r_squared) + "," +
               format_sci(best.rmse) + "," + format_sci(ref == &best ? 0.0 : d_r2) + "," +
               format_sci(ref == &best ? 0.0 : d_rmse) + "\n";
        if (const auto pos = ranking.position(reference)) {
            ++ranked;
            if (*pos == 0) ++first;
            if (*pos <= 1) ++top_two;
        }
    }
    const double fb = ranked ? static_cast<double>(first) / ranked : std::nan("");
    const double ft = ranked ? static_cast<double>(top_two) / ranked : std::nan("");
    out += "# reference," + std::string(to_token(reference)) + "\n";
    out += "# fraction_best," + format_sci(fb) + "\n";
    out += "# fraction_top_two," + format_sci(ft) + "\n";
    return out;
}

std::pair<std::vector<double>, std::vector<double>> fit_grid(const AggregateCurve& curve,
                                                             int grid_points) {
    std::vector<double> xs, ys;
    for (auto k : log_grid(curve.draws(), grid_points)) {
        xs.push_back(static_cast<double>(k));
        ys.push_back(curve.values[static_cast<std::size_t>(k)]);
    }
    return {std::move(xs), std::move(ys)};
}

std::string plot_csv(std::span<const double> xs, std::span<const double> observed,
                     const Ranking& ranking, std::size_t top) {
    const auto n = std::min(top, ranking.order.size());
    std::string out = "x,observed";
    std::vector<std::vector<double>> fitted;
    for (std::size_t m = 0; m < n; ++m) {
        out += "," + std::string(to_token(ranking.order[m].model));
        fitted.push_back(predict(ranking.order[m], xs));
    }
    out += "\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += format_sci(xs[i]) + "," + format_sci(observed[i]);
        for (std::size_t m = 0; m < n; ++m) {
            // phi9 is undefined at the origin
            const bool hole = xs[i] == 0.0 && excludes_origin(ranking.order[m].model);
            out += "," + format_sci(hole ? std::nan("") : fitted[m][i]);
        }
        out += "\n";
    }
    return out;
}

namespace {

const FitResult* find_fit(const SubjectFits& s, ModelId id) {
    for (const auto& f : s.fits) {
        if (f.model == id) return &f;
    }
    return nullptr;
}

double score(const FitResult& f, Metric m) {
    if (!f.converged) return std::nan("");
    return m == Metric::r_squared ? f.r_squared : f.rmse;
}

}  // namespace

ComparisonInput comparison_input(std::span<const SubjectFits> subjects, ModelId reference,
                                 ModelId other, Metric metric) {
    ComparisonInput in;
    for (const auto& s : subjects) {
        const auto* a = find_fit(s, reference);
        const auto* b = find_fit(s, other);
        if (!a || !b) continue;
        in.scores[s.subject] = {score(*a, metric), score(*b, metric)};
        if (const auto pos = make_ranking(s.fits, reference).position(reference))
            in.reference_positions[s.subject] = static_cast<int>(*pos);
    }
    return in;
}

std::string comparison_csv(std::span<const SubjectFits> subjects, ModelId reference,
                           std::span<const ModelId> others, Metric metric) {
    std::string out = "model_a,model_b,N,n_effective,W,Z,p,effect,method\n";
    std::string footer;
    for (auto other : others) {
        if (other == reference) continue;
        const auto in = comparison_input(subjects, reference, other, metric);
        if (in.scores.empty()) continue;
        const auto c = compare_models_across_subjects(in.scores, in.reference_positions);
        out += std::string(to_token(reference)) + "," + std::string(to_token(other)) + "," +
               std::to_string(c.test.n_pairs) + "," + std::to_string(c.test.n_effective) + "," +
               format_sci(c.test.w_statistic) + "," + format_sci(c.test.z_statistic) + "," +
               format_sci(c.test.p_value) + "," + format_sci(c.test.effect_size) + "," +
               std::string(rtg::to_string(c.test.method)) + "\n";
        footer += "# excluded," + std::string(to_token(other)) + "," +
                  std::to_string(c.test.n_excluded) + "\n";
    }
    out += "# metric," + std::string(to_string(metric)) + "\n";
    return out + footer;
}

std::string summary_csv(std::span<const std::pair<std::string, SummaryStats>> rows) {
    std::string out = "subject,S,T,F,E_sigma,E_gamma,E_delta,sd_delta\n";
    for (const auto& [subject, s] : rows) {
        out += io::quote_csv(subject) + "," + std::to_string(s.sessions) + "," +
               std::to_string(s.draws) + "," + std::to_string(s.max_faults) + "," +
               format_sci(s.mean_sd) + "," + format_sci(s.mean_skew) + "," +
               format_sci(s.mean_delta) + "," + format_sci(s.sd_delta) + "\n";
    }
    return out;
}

std::string ladder_csv(std::span<const std::pair<std::string, std::vector<FitResult>>> rows) {
    std::string out = "subject,model,R2,RMSE\n";
    for (const auto& [subject, fits] : rows) {
        for (const auto& f : fits)
            out += io::quote_csv(subject) + "," + std::string(to_token(f.model)) + "," +
                   format_sci(f.r_squared) + "," + format_sci(f.rmse) + "\n";
    }
    return out;
}

}  // namespace rtg::report
