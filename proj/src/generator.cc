#include "eqodds/generator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "eqodds/errors.h"

namespace eqodds {

namespace {

constexpr std::array<std::string_view, kNumDomains> kCodePrefix = {
    "dx", "px", "rx", "lab", "enc", "dept", "obs"};

// Age range (in years) the eligible index window is placed in, per bin.
constexpr std::array<double, kNumAgeGroups> kAgeLo = {40, 55, 65, 75};
constexpr std::array<double, kNumAgeGroups> kAgeHi = {55, 65, 75, 90};

const Date kEarliestWindowStart = MakeDate(2000, 1, 1);
constexpr long kWindowStartRangeDays = 4018;  // through 2010-12-31

template <size_t N>
void CheckDistribution(const std::array<double, N>& p, const char* field) {
  double total = 0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ValidationError(std::string(field) + " entries must be finite and >= 0");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError(std::string(field) + " must sum to 1 (got " +
                          std::to_string(total) + ")");
  }
}

template <size_t N>
void CheckFinite(const std::array<double, N>& v, const char* field) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError(std::string(field) + " must be finite");
  }
}

void CheckUnit(double x, const char* field) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError(std::string(field) + " must lie in [0, 1]");
  }
}

template <size_t N>
int DrawCategory(Rng& rng, const std::array<double, N>& p) {
  const double u = rng.Uniform();
  double acc = 0;
  for (size_t i = 0; i < N; ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Rounding slack lands on the last category with positive mass.
  for (size_t i = N; i-- > 0;) {
    if (p[i] > 0) return static_cast<int>(i);
  }
  return 0;
}

std::string ConceptCode(uint32_t concept_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%05u",
                kCodePrefix[concept_id % kNumDomains].data(), concept_id);
  return buf;
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Zipf-like sampler over the non-informative concepts.
class ZipfSampler {
 public:
  ZipfSampler(uint32_t first, uint32_t count, double exponent) : first_(first) {
    cdf_.resize(count);
    double acc = 0;
    for (uint32_t r = 0; r < count; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cdf_[r] = acc;
    }
    for (double& c : cdf_) c /= acc;
  }

  uint32_t Draw(Rng& rng) const {
    const double u = rng.Uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const size_t r = std::min<size_t>(it - cdf_.begin(), cdf_.size() - 1);
    return first_ + static_cast<uint32_t>(r);
  }

  bool empty() const { return cdf_.empty(); }

 private:
  uint32_t first_;
  std::vector<double> cdf_;
};

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.UniformInt(items.size())];
}

}  // namespace

const std::vector<std::string>& PlantedAscvdCodes() {
  static const std::vector<std::string> codes = {
      "410.1", "410.71", "410.90", "430", "431", "433.11", "434.91", "436"};
  return codes;
}
const std::vector<std::string>& PlantedChdCodes() {
  static const std::vector<std::string> codes = {"411.1", "413.9", "414.00",
                                                 "414.01"};
  return codes;
}
const std::vector<std::string>& PlantedLipidCodes() {
  static const std::vector<std::string> codes = {"C10AA05", "C10AA01", "C10AA07",
                                                 "C10BA02"};
  return codes;
}
const std::vector<std::string>& PlantedCvdCodes() {
  static const std::vector<std::string> codes = {"427.31", "428.0", "410.01",
                                                 "434.11"};
  return codes;
}

void ValidateConfig(const SyntheticCohortConfig& c) {
  CheckDistribution(c.race_proportions, "race_proportions");
  CheckDistribution(c.gender_proportions, "gender_proportions");
  CheckDistribution(c.age_proportions, "age_proportions");
  if (!(c.base_incidence > 0.0 && c.base_incidence < 1.0)) {
    throw ValidationError("base_incidence must lie in (0, 1)");
  }
  CheckFinite(c.race_incidence_multiplier, "race_incidence_multiplier");
  CheckFinite(c.gender_incidence_multiplier, "gender_incidence_multiplier");
  CheckFinite(c.age_incidence_multiplier, "age_incidence_multiplier");
  for (int r = 0; r < kNumRaces; ++r) {
    for (int g = 0; g < kNumGenders; ++g) {
      for (int a = 0; a < kNumAgeGroups; ++a) {
        const double p = CellIncidence(c, r, g, a);
        if (!(p > 0.0 && p < 1.0)) {
          throw ValidationError(
              "incidence multipliers: cell (" + std::string(kRaceNames[r]) + ", " +
              std::string(kGenderNames[g]) + ", " + std::string(kAgeGroupNames[a]) +
              ") incidence " + std::to_string(p) + " is outside (0, 1)");
        }
      }
    }
  }
  CheckFinite(c.race_score_shift, "race_score_shift");
  CheckFinite(c.gender_score_shift, "gender_score_shift");
  CheckFinite(c.age_score_shift, "age_score_shift");
  if (c.concept_vocab_size == 0) {
    throw ValidationError("concept_vocab_size must be positive");
  }
  if (c.n_informative > c.concept_vocab_size) {
    throw ValidationError("n_informative must not exceed concept_vocab_size");
  }
  if (!(c.mean_events_per_patient > 0.0) || !std::isfinite(c.mean_events_per_patient)) {
    throw ValidationError("mean_events_per_patient must be positive");
  }
  if (!std::isfinite(c.signal_strength)) {
    throw ValidationError("signal_strength must be finite");
  }
  if (!std::isfinite(c.informative_offset)) {
    throw ValidationError("informative_offset must be finite");
  }
  CheckUnit(c.fatal_chd_fraction, "fatal_chd_fraction");
  CheckUnit(c.nonfatal_chd_rate, "nonfatal_chd_rate");
  CheckUnit(c.exclusion_fraction, "exclusion_fraction");
  CheckUnit(c.death_rate, "death_rate");
}

double CellIncidence(const SyntheticCohortConfig& c, int race, int gender,
                     int age_group) {
  return c.base_incidence * c.race_incidence_multiplier[race] *
         c.gender_incidence_multiplier[gender] * c.age_incidence_multiplier[age_group];
}

SyntheticCohortConfig ReferenceCohortConfig(uint64_t n_patients, uint64_t seed) {
  constexpr double kOverall = 0.0135;
  constexpr std::array<double, kNumRaces> race_count = {34156, 9018,  21587,
                                                        19100, 30300, 136348};
  constexpr std::array<double, kNumRaces> race_inc = {0.0144, 0.0271, 0.0152,
                                                      0.013,  0.00512, 0.0141};
  constexpr std::array<double, kNumGenders> gender_count = {154266, 96074};
  constexpr std::array<double, kNumGenders> gender_inc = {0.0116, 0.0167};
  constexpr std::array<double, kNumAgeGroups> age_count = {117510, 64477, 44149,
                                                           24373};
  constexpr std::array<double, kNumAgeGroups> age_inc = {0.00603, 0.0128, 0.02,
                                                         0.0398};

  SyntheticCohortConfig c;
  c.n_patients = n_patients;
  c.seed = seed;
  // Normalizes counts to proportions and incidences to multipliers around the
  // overall rate; returns E[multiplier].
  const auto fill = [&](const auto& counts, const auto& inc, auto& prop, auto& mult) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double mean_mult = 0;
    for (size_t i = 0; i < counts.size(); ++i) {
      prop[i] = counts[i] / total;
      mult[i] = inc[i] / kOverall;
      mean_mult += prop[i] * mult[i];
    }
    return mean_mult;
  };
  const double er = fill(race_count, race_inc, c.race_proportions,
                         c.race_incidence_multiplier);
  const double eg = fill(gender_count, gender_inc, c.gender_proportions,
                         c.gender_incidence_multiplier);
  const double ea = fill(age_count, age_inc, c.age_proportions,
                         c.age_incidence_multiplier);
  // Attributes are drawn independently, so this makes the expected overall
  // incidence exactly kOverall.
  c.base_incidence = kOverall / (er * eg * ea);
  return c;
}

SyntheticCohort GenerateSyntheticCohort(const SyntheticCohortConfig& config) {
  ValidateConfig(config);
  SyntheticCohort out;
  out.records.reserve(config.n_patients);
  out.truth.reserve(config.n_patients);

  const uint32_t vocab = config.concept_vocab_size;
  const uint32_t n_inf = config.n_informative;
  const ZipfSampler noise(n_inf, vocab - n_inf, 1.05);
  std::vector<std::string> codes(vocab);
  for (uint32_t c = 0; c < vocab; ++c) codes[c] = ConceptCode(c);

  for (uint64_t i = 0; i < config.n_patients; ++i) {
    Rng rng = Rng::Derive(config.seed, "patient", i);
    PatientRecord p;
    PlantedTruth truth;
    char id[32];
    std::snprintf(id, sizeof(id), "P%08llu", static_cast<unsigned long long>(i));
    p.patient_id = id;

    const int race = DrawCategory(rng, config.race_proportions);
    const int gender = DrawCategory(rng, config.gender_proportions);
    const int age_group = DrawCategory(rng, config.age_proportions);
    p.race = static_cast<Race>(race);
    p.gender = static_cast<Gender>(gender);
    truth.groups = {race, gender, age_group};

    // Timeline. Only the window [S, S + W] holds eligible index dates:
    // history encounters sit in [S - 365, S), follow-up encounters in
    // (L - 365, L] with L >= S + W + 365, and nothing in between.
    const Date window_start =
        kEarliestWindowStart + std::chrono::days{rng.UniformInt(kWindowStartRangeDays)};
    const long width = static_cast<long>(rng.UniformInt(366));
    const Date first = window_start - std::chrono::days{kMinHistoryDays};
    const long gap = (kMinHistoryDays - width) + static_cast<long>(rng.UniformInt(731));
    const Date last = window_start + std::chrono::days{width + kMinFollowupDays + gap};
    truth.followup_days = DaysBetween(window_start + std::chrono::days{width / 2}, last);

    const double age_at_start =
        rng.Uniform(kAgeLo[age_group] + 0.02, kAgeHi[age_group] - 1.02);
    p.birth_date =
        window_start - std::chrono::days{std::llround(age_at_start * 365.2425)};

    std::vector<Date> history = {first};
    for (uint64_t k = rng.Poisson(3.0); k > 0; --k) {
      history.push_back(first + std::chrono::days{1 + rng.UniformInt(kMinHistoryDays - 1)});
    }
    std::vector<Date> encounters = history;
    encounters.push_back(window_start);
    for (uint64_t k = rng.Poisson(2.0); k > 0; --k) {
      encounters.push_back(window_start + std::chrono::days{rng.UniformInt(width + 1)});
    }
    encounters.push_back(last);
    for (uint64_t k = rng.Poisson(2.0); k > 0; --k) {
      encounters.push_back(last - std::chrono::days{rng.UniformInt(kMinFollowupDays - 1)});
    }

    const auto add_concept = [&](Date date, uint32_t concept_id) {
      ClinicalEvent e;
      e.date = date;
      e.domain = static_cast<Domain>(concept_id % kNumDomains);
      e.code = codes[concept_id];
      if (e.domain == Domain::kLabTest) {
        e.value = std::round((5.0 + 1.5 * rng.Normal()) * 100.0) / 100.0;
      }
      p.events.push_back(std::move(e));
    };

    // Every encounter date carries at least one event.
    if (!noise.empty()) {
      for (const Date d : encounters) add_concept(d, noise.Draw(rng));
      for (uint64_t k = rng.Poisson(config.mean_events_per_patient); k > 0; --k) {
        add_concept(Pick(rng, encounters), noise.Draw(rng));
      }
    } else {
      for (const Date d : encounters) add_concept(d, 0);
    }

    const double latent = rng.Logistic();
    const double shift = config.race_score_shift[race] +
                         config.gender_score_shift[gender] +
                         config.age_score_shift[age_group];
    for (uint32_t c = 0; c < n_inf; ++c) {
      const double prob = Sigmoid(config.informative_offset +
                                  config.signal_strength * (latent + shift));
      if (rng.Bernoulli(prob)) add_concept(Pick(rng, history), c);
    }

    const double incidence = CellIncidence(config, race, gender, age_group);
    truth.outcome = latent + std::log(incidence / (1.0 - incidence)) > 0.0 ? 1 : 0;

    const auto add_dx = [&](Date date, const std::string& code) {
      p.events.push_back(ClinicalEvent{date, Domain::kDiagnosis, code, std::nullopt});
    };
    if (truth.outcome == 1) {
      if (rng.Bernoulli(config.fatal_chd_fraction)) {
        add_dx(last, Pick(rng, PlantedChdCodes()));
        p.death_date = last + std::chrono::days{rng.UniformInt(kFatalChdWindowDays + 1)};
      } else {
        add_dx(last, Pick(rng, PlantedAscvdCodes()));
      }
    } else if (rng.Bernoulli(config.nonfatal_chd_rate)) {
      add_dx(last, Pick(rng, PlantedChdCodes()));
      if (rng.Bernoulli(0.5)) {
        p.death_date =
            last + std::chrono::days{kFatalChdWindowDays + 1 + rng.UniformInt(730)};
      }
    } else if (rng.Bernoulli(config.death_rate)) {
      p.death_date = last + std::chrono::days{rng.UniformInt(1000)};
    }

    if (rng.Bernoulli(config.exclusion_fraction)) {
      truth.excluded = true;
      if (rng.Bernoulli(0.5)) {
        p.events.push_back(ClinicalEvent{first, Domain::kMedicationOrder,
                                         Pick(rng, PlantedLipidCodes()), std::nullopt});
      } else {
        add_dx(first, Pick(rng, PlantedCvdCodes()));
      }
    }

    std::stable_sort(p.events.begin(), p.events.end(),
                     [](const ClinicalEvent& a, const ClinicalEvent& b) {
                       return a.date < b.date;
                     });
    out.records.push_back(std::move(p));
    out.truth.push_back(truth);
  }
  return out;
}

CohortExpectation ExpectedCohortCounts(const SyntheticCohortConfig& c) {
  ValidateConfig(c);
  const double n = static_cast<double>(c.n_patients);
  const double keep = 1.0 - c.exclusion_fraction;
  std::array<double, kNumRaces> race_p{}, race_q{};
  std::array<double, kNumGenders> gender_p{}, gender_q{};
  std::array<double, kNumAgeGroups> age_p{}, age_q{};
  double all_p = 0, all_q = 0;
  for (int r = 0; r < kNumRaces; ++r) {
    for (int g = 0; g < kNumGenders; ++g) {
      for (int a = 0; a < kNumAgeGroups; ++a) {
        const double cell = c.race_proportions[r] * c.gender_proportions[g] *
                            c.age_proportions[a] * keep;
        const double pos = cell * CellIncidence(c, r, g, a);
        race_p[r] += cell;
        race_q[r] += pos;
        gender_p[g] += cell;
        gender_q[g] += pos;
        age_p[a] += cell;
        age_q[a] += pos;
        all_p += cell;
        all_q += pos;
      }
    }
  }
  const auto expect = [n](double p, double q) {
    return GroupExpectation{n * p, n * p * (1 - p), n * q, n * q * (1 - q)};
  };
  CohortExpectation e;
  for (int r = 0; r < kNumRaces; ++r) e.race[r] = expect(race_p[r], race_q[r]);
  for (int g = 0; g < kNumGenders; ++g) e.gender[g] = expect(gender_p[g], gender_q[g]);
  for (int a = 0; a < kNumAgeGroups; ++a) e.age[a] = expect(age_p[a], age_q[a]);
  e.all = expect(all_p, all_q);
  return e;
}

std::vector<SummaryRow> SummarizeCohort(const std::vector<GroupAssignment>& groups,
                                        const std::vector<int>& outcomes,
                                        const std::vector<long>& followup_days) {
  struct Acc {
    uint64_t n = 0, pos = 0;
    double days = 0;
  };
  std::array<Acc, kNumRaces> race{};
  std::array<Acc, kNumGenders> gender{};
  std::array<Acc, kNumAgeGroups> age{};
  Acc all;
  for (size_t i = 0; i < groups.size(); ++i) {
    for (Acc* acc : {&race[groups[i].race_group], &gender[groups[i].gender_group],
                     &age[groups[i].age_group], &all}) {
      ++acc->n;
      acc->pos += outcomes[i];
      acc->days += static_cast<double>(followup_days[i]);
    }
  }
  std::vector<SummaryRow> rows;
  const auto emit = [&rows](std::string_view name, const Acc& acc) {
    SummaryRow row;
    row.group = std::string(name);
    row.count = acc.n;
    if (acc.n > 0) {
      row.incidence = static_cast<double>(acc.pos) / static_cast<double>(acc.n);
      row.mean_followup_years = acc.days / static_cast<double>(acc.n) / 365.25;
    }
    rows.push_back(row);
  };
  for (int r = 0; r < kNumRaces; ++r) emit(kRaceNames[r], race[r]);
  for (int g = 0; g < kNumGenders; ++g) emit(kGenderNames[g], gender[g]);
  for (int a = 0; a < kNumAgeGroups; ++a) emit(kAgeGroupNames[a], age[a]);
  emit("All", all);
  return rows;
}

std::vector<SummaryRow> SummarizePlanted(const SyntheticCohort& cohort) {
  std::vector<GroupAssignment> groups;
  std::vector<int> outcomes;
  std::vector<long> followup;
  for (const PlantedTruth& t : cohort.truth) {
    if (t.excluded) continue;
    groups.push_back(t.groups);
    outcomes.push_back(t.outcome);
    followup.push_back(t.followup_days);
  }
  return SummarizeCohort(groups, outcomes, followup);
}

std::string FormatSummaryTable(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-10s %10s %16s %26s\n", "Group", "Count",
                "ASCVD Incidence", "Follow-up Length (Years)");
  out << buf;
  for (const SummaryRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-10s %10llu %16.5f %26.2f\n", row.group.c_str(),
                  static_cast<unsigned long long>(row.count), row.incidence,
                  row.mean_followup_years);
    out << buf;
  }
  return out.str();
}

}  // namespace eqodds
