// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/kb/dataset.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/args.h>
#include <fmt/format.h>

#include "salesassist/errors.hpp"

namespace salesassist::kb {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON mapping

void to_json(json& j, const Product& v) {
    j = json{{"id", v.id}, {"name", v.name}, {"category", v.category}, {"description", v.description}};
}
void from_json(const json& j, Product& v) {
    j.at("id").get_to(v.id);
    j.at("name").get_to(v.name);
    j.at("category").get_to(v.category);
    j.at("description").get_to(v.description);
}
void to_json(json& j, const CoverageDetail& v) {
    j = json{{"id", v.id},         {"product_id", v.product_id}, {"coverage_type", v.coverage_type},
             {"amount", v.amount}, {"deductible", v.deductible}, {"conditions", v.conditions}};
}
void from_json(const json& j, CoverageDetail& v) {
    j.at("id").get_to(v.id);
    j.at("product_id").get_to(v.product_id);
    j.at("coverage_type").get_to(v.coverage_type);
    j.at("amount").get_to(v.amount);
    j.at("deductible").get_to(v.deductible);
    j.at("conditions").get_to(v.conditions);
}
void to_json(json& j, const PolicyTerm& v) {
    j = json{{"id", v.id},
             {"product_id", v.product_id},
             {"term_length", v.term_length},
             {"renewal_policy", v.renewal_policy},
             {"cancellation_policy", v.cancellation_policy}};
}
void from_json(const json& j, PolicyTerm& v) {
    j.at("id").get_to(v.id);
    j.at("product_id").get_to(v.product_id);
    j.at("term_length").get_to(v.term_length);
    j.at("renewal_policy").get_to(v.renewal_policy);
    j.at("cancellation_policy").get_to(v.cancellation_policy);
}
void to_json(json& j, const Faq& v) {
    j = json{{"id", v.id}, {"product_id", v.product_id}, {"question", v.question}, {"answer", v.answer}};
}
void from_json(const json& j, Faq& v) {
    j.at("id").get_to(v.id);
    j.at("product_id").get_to(v.product_id);
    j.at("question").get_to(v.question);
    j.at("answer").get_to(v.answer);
}
void to_json(json& j, const PricingTier& v) {
    j = json{{"id", v.id},
             {"product_id", v.product_id},
             {"tier_name", v.tier_name},
             {"monthly_premium", v.monthly_premium},
             {"annual_premium", v.annual_premium},
             {"age_min", v.age_min},
             {"age_max", v.age_max}};
}
void from_json(const json& j, PricingTier& v) {
    j.at("id").get_to(v.id);
    j.at("product_id").get_to(v.product_id);
    j.at("tier_name").get_to(v.tier_name);
    j.at("monthly_premium").get_to(v.monthly_premium);
    j.at("annual_premium").get_to(v.annual_premium);
    j.at("age_min").get_to(v.age_min);
    j.at("age_max").get_to(v.age_max);
}
void to_json(json& j, const Dataset& v) {
    j = json{{"products", v.products},
             {"coverage_details", v.coverage_details},
             {"policy_terms", v.policy_terms},
             {"faqs", v.faqs},
             {"pricing_tiers", v.pricing_tiers}};
}
void from_json(const json& j, Dataset& v) {
    // missing arrays are treated as empty
    auto take = [&j](const char* key, auto& out) {
        if (j.contains(key)) j.at(key).get_to(out);
    };
    take("products", v.products);
    take("coverage_details", v.coverage_details);
    take("policy_terms", v.policy_terms);
    take("faqs", v.faqs);
    take("pricing_tiers", v.pricing_tiers);
}

std::string serialize_dataset(const Dataset& d) {
    return json(d).dump(1);
}

Dataset parse_dataset(std::string_view json_text) {
    try {
        return json::parse(json_text).get<Dataset>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid dataset document: ") + e.what());
    }
}

Dataset load_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot read dataset file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_dataset(ss.str());
}

// ---------------------------------------------------------------------------
// Generator

namespace {

struct CategoryProfile {
    std::string_view category;
    std::array<std::string_view, 10> names;
    std::array<std::string_view, 6> coverages;
    std::string_view insured;     // what the policy protects
    std::string_view claim_item;  // what a claim is about
    std::string_view audience;
    std::string_view exclusion;
    std::array<std::string_view, 3> terms;
    std::int64_t amount_lo, amount_hi, amount_step;
    std::int64_t deductible_lo, deductible_hi, deductible_step;
    int premium_lo, premium_hi;  // monthly, whole dollars
};

// clang-format off
const std::array<CategoryProfile, 10> kProfiles = {{
    {"Life",
     {"SecureLife Premium Term 30", "TrueTerm Essentials 20", "LegacyGuard Whole Life", "EverGreen Universal Life",
      "FinalCare Burial Plan", "HorizonLife Indexed Universal", "YoungFamily Term 15", "GuaranteedLife Simplified Issue",
      "NestEgg Variable Life", "BridgeTerm 10"},
     {"Death Benefit", "Accelerated Death Benefit", "Waiver of Premium", "Accidental Death Rider",
      "Child Term Rider", "Terminal Illness Benefit"},
     "the insured person", "death or terminal illness", "families who want income replacement and debt protection",
     "suicide within the first two policy years", {"30 years", "20 years", "Lifetime"},
     100000, 1000000, 50000, 0, 0, 1, 20, 150},
    {"Health",
     {"FamilyCare Advantage Plan", "VitalHealth Bronze Saver", "VitalHealth Gold PPO", "WellPath HMO Select",
      "CareBridge Catastrophic", "PrimeHealth Silver EPO", "SeniorCare Medigap Plus", "StudentHealth Campus Plan",
      "MetroCare Platinum", "Harmony HSA Plan"},
     {"Hospitalization", "Emergency Room", "Prescription Drugs", "Preventive Care", "Specialist Visits",
      "Out-of-Pocket Maximum"},
     "members and enrolled dependents", "medical", "individuals and families seeking comprehensive medical care",
     "cosmetic surgery", {"12 months", "12 months", "Calendar year"},
     5000, 2000000, 5000, 500, 6000, 250, 250, 900},
    {"Auto",
     {"SafeDrive Elite", "SafeDrive Basic Liability", "RoadGuard Full Coverage", "EcoMile Pay-Per-Mile",
      "ClassicCar Collector", "TeenDriver Starter", "FleetLite Rideshare", "UrbanCommuter Auto", "RoadGuard Plus",
      "AllWeather Auto Shield"},
     {"Bodily Injury Liability", "Property Damage Liability", "Collision", "Comprehensive",
      "Uninsured Motorist", "Roadside Assistance"},
     "your vehicle and listed drivers", "accident", "drivers who want strong protection at a predictable price",
     "racing or commercial delivery use", {"6 months", "12 months", "6 months"},
     25000, 500000, 25000, 250, 2000, 250, 80, 260},
    {"Home",
     {"HomeShield Complete", "CondoCare Essentials", "RenterSafe Basic", "HearthGuard Premier",
      "CoastalHome Wind & Flood", "CabinCover Seasonal", "LandlordGuard Rental", "HearthGuard Basic",
      "NewBuild Homeowner", "MetroLoft Condo Plus"},
     {"Dwelling", "Personal Property", "Personal Liability", "Loss of Use", "Water Backup",
      "Medical Payments to Others"},
     "your home and belongings", "property damage", "homeowners and renters protecting their residence",
     "gradual wear and tear", {"12 months", "12 months", "12 months"},
     100000, 800000, 25000, 500, 5000, 500, 60, 250},
    {"Travel",
     {"Globetrotter Shield", "TripSafe Basic", "NomadCare Annual Multi-Trip", "Voyager Cruise Protect",
      "StudyAbroad Secure", "WeekendAway Lite", "BusinessFlyer Plus", "AdventureSport Travel", "FamilyVacation Guard",
      "SeniorTravel Comfort"},
     {"Trip Cancellation", "Emergency Medical", "Medical Evacuation", "Baggage Loss", "Trip Delay",
      "Trip Interruption"},
     "each insured traveler", "trip disruption", "leisure and business travelers going abroad",
     "travel against a government advisory", {"Single trip", "365 days", "Single trip"},
     5000, 500000, 5000, 0, 500, 50, 15, 90},
    {"Disability",
     {"IncomeGuard Short-Term", "IncomeGuard Long-Term", "WorkStrong Own-Occupation", "SteadyPay Accident Only",
      "ProShield Physician Disability", "GigWorker Income Protect", "CareerSafe Group Plus", "BackUp Income Lite",
      "TradesPro Disability", "ExecIncome Premier"},
     {"Monthly Benefit", "Partial Disability", "Residual Benefit", "Cost of Living Adjustment",
      "Rehabilitation Benefit", "Survivor Benefit"},
     "your earned income", "disability", "working professionals who depend on their paycheck",
     "self-inflicted injuries", {"To age 65", "2 years", "5 years"},
     2000, 15000, 500, 0, 0, 1, 30, 200},
    {"Dental",
     {"BrightSmile Dental PPO", "SmileSaver Basic", "OrthoPlus Family Dental", "DentalFirst HMO",
      "SeniorSmile Dentures Plus", "PearlCare Preventive", "KidsTeeth Starter", "DentalMax Premier",
      "SimpleSmile Discount", "CrownGuard Major Care"},
     {"Preventive Cleanings", "Fillings", "Root Canals", "Crowns and Bridges", "Orthodontics", "Dentures"},
     "enrolled members", "dental", "families and seniors who want predictable dental costs",
     "teeth whitening", {"12 months", "12 months", "Calendar year"},
     1000, 3000, 250, 50, 150, 25, 20, 80},
    {"Vision",
     {"ClearView Vision Plus", "EyeCare Essentials", "FocusFrame Premier", "KidsSight Vision",
      "LensLite Contacts Plan", "SharpSight Basic", "VisionMax Family", "ScreenSaver Digital Eyes",
      "SeniorSight Plus", "BrightEyes Discount"},
     {"Annual Eye Exam", "Frames Allowance", "Lenses", "Contact Lenses", "LASIK Discount", "Lens Coatings"},
     "enrolled members", "vision", "people who wear glasses or contacts",
     "non-prescription sunglasses", {"12 months", "24 months", "12 months"},
     150, 500, 25, 0, 50, 10, 8, 30},
    {"Pet",
     {"PawProtect Accident & Illness", "PawProtect Wellness", "FurFamily Complete", "SeniorPet Care",
      "ExoticPet Shield", "PuppyStart Plan", "WhiskerCare Cat Plan", "TailWag Accident Only", "HealthyHound Plus",
      "PetPal Budget"},
     {"Accident Care", "Illness Care", "Emergency Surgery", "Prescription Medication", "Wellness Exams",
      "Hereditary Conditions"},
     "your enrolled pet", "veterinary", "dog and cat owners planning for vet bills",
     "pre-existing conditions", {"12 months", "12 months", "12 months"},
     5000, 20000, 1000, 100, 1000, 50, 25, 90},
    {"Business",
     {"BizGuard General Liability", "ProCover Professional Liability", "ShopSafe BOP", "CyberShield Business",
      "WorkForce Comp Plus", "FleetPro Commercial Auto", "StartUp Shield", "ContractorGuard Plus",
      "RetailRisk Package", "DataBreach Response Pro"},
     {"General Liability", "Property", "Business Interruption", "Cyber Liability", "Workers Compensation",
      "Professional Errors and Omissions"},
     "your business operations", "business loss", "small and mid-sized businesses",
     "intentional acts by owners", {"12 months", "12 months", "36 months"},
     500000, 5000000, 250000, 500, 10000, 500, 80, 600},
}};
// clang-format on

enum Theme { kDeductible, kClaims, kEligibility, kRenewal, kLimit, kWaiting, kCancel, kPremium, kExclusions, kAddOns };
constexpr int kThemes = 10;

const std::array<std::array<std::string_view, 5>, kThemes> kQuestions = {{
    {"What is the deductible for {p}?",
     "How does the deductible work on {p} if I file more than one claim in a year?",
     "Can I lower my deductible on {p} by paying a higher premium?",
     "Does the {p} deductible apply to every {item} claim?",
     "Is there a separate family deductible under {p}?"},
    {"How do I file a claim with {p}?", "How long does it take to get a claim paid under {p}?",
     "What documents do I need to submit a {p} claim?", "Can I track the status of my {p} claim online?",
     "What happens if my {p} claim is denied?"},
    {"Who is eligible to enroll in {p}?", "Is there an age limit to apply for {p}?",
     "Do I need a medical exam or inspection to qualify for {p}?",
     "Can I add family members or additional insureds to {p}?",
     "Can I qualify for {p} with a prior claims history?"},
    {"How does renewal work for {p}?", "Will {p} renew automatically at the end of the term?",
     "Can my {p} rate change at renewal?", "Can I convert or upgrade {p} when it renews?",
     "Is there a grace period if I miss a {p} renewal payment?"},
    {"What is the maximum benefit under {p}?", "What is the out-of-pocket maximum on {p}?",
     "Are there annual or lifetime limits on {p}?", "How much {cov0} protection does {p} provide?",
     "Can I increase the benefit limit on {p}?"},
    {"Is there a waiting period before {p} starts paying benefits?", "When does my {p} protection become effective?",
     "Does {p} waive the waiting period for accidents?", "Is there a waiting period for {cov1} under {p}?",
     "Can I shorten the waiting period on {p}?"},
    {"How do I cancel {p}?", "Do I get a refund if I cancel {p} early?", "Is there a free-look period for {p}?",
     "Can the insurer cancel my {p} contract?", "What fees apply if I cancel {p} mid-term?"},
    {"How much does {p} cost per month?", "Will my premium go up after a claim on {p}?",
     "Are there discounts available for {p}?", "Can I pay for {p} annually instead of monthly?",
     "How is the premium for {p} calculated?"},
    {"What is not covered by {p}?", "Does {p} include {cov2}?", "Are there any exclusions for {p} in the first year?",
     "Is {excl} excluded from {p}?", "Does {p} protect me outside the country?"},
    {"What riders or add-ons are available with {p}?", "How much does the {cov3} add-on cost for {p}?",
     "Can I remove an add-on from {p} later?", "Does {p} offer accident forgiveness or a similar benefit?",
     "Can I bundle {p} with another product for a discount?"},
}};

const std::array<std::string_view, kThemes> kAnswerCores = {
    "The {p} deductible is ${ded} per policy period for {insured}. Once it is met, the plan pays {pct}% of eligible "
    "{item} costs up to the ${amt} limit, and the deductible resets at each renewal date.",
    "Claims for {p} can be filed online, in the mobile app, or by phone at any hour. Most {item} claims are reviewed "
    "within {days} business days, and approved payments are issued by direct deposit within {pdays} days.",
    "{p} is available to applicants aged {agemin} to {agemax} who meet standard underwriting. Coverage for {insured} "
    "can start the same day for most applicants, and a simplified application is available below ${half}.",
    "{p} runs on a {term} term and renews automatically unless you opt out at least {notice} days before the end "
    "date. Renewal rates are based on the current rate filing and are capped at a {cap}% change per renewal.",
    "The maximum benefit for {p} is ${amt} for {cov0}, with an out-of-pocket maximum of ${oop} per period. After the "
    "limit is reached, eligible {item} expenses are covered at 100% for the rest of the period.",
    "{p} has a {wait}-day waiting period for {cov1}; accidents are covered from day one. Benefits for {insured} "
    "become effective at 12:01 a.m. on the first day after the waiting period ends.",
    "You can cancel {p} at any time by phone or in writing. A {free}-day free-look period applies to new policies, "
    "and after that unused premium is refunded on a pro-rata basis minus a ${fee} administrative fee.",
    "{p} starts at ${prem} per month, or ${annual} per year when paid annually. Premiums depend on age, location, "
    "and selected tier, and multi-policy or autopay discounts can reduce the rate by up to {disc}%.",
    "{p} does not cover {excl}, intentional damage, or losses that occurred before the effective date. {cov2} is "
    "included subject to a ${ded} deductible and the conditions listed in the policy schedule.",
    "{p} offers optional add-ons including {cov3} for ${rider} per month. Add-ons can be added at any renewal, and "
    "some may require a short underwriting questionnaire before they take effect.",
};

const std::array<std::string_view, 14> kFillers = {
    "All amounts are stated in U.S. dollars and apply per insured unless the schedule of benefits says otherwise.",
    "Your policy documents and the schedule of benefits are always available in the online account portal.",
    "Licensed agents can review the details with you and compare options side by side before you decide.",
    "State regulations may modify some provisions, so the final contract language always takes precedence.",
    "Changes requested mid-term are prorated and take effect on the next billing cycle after approval.",
    "Customers who enroll in paperless billing and autopay receive faster processing and fewer reminders.",
    "If your circumstances change, you can request a coverage review at no cost at any time during the term.",
    "Written confirmation of every change is sent by email within one business day of processing.",
    "Customer service is available seven days a week, and claims can be reported around the clock.",
    "Premium payments can be made by bank transfer, card, or check, with a ten-day grace period on each bill.",
    "Existing customers in good standing may qualify for loyalty credits applied at their next renewal.",
    "Benefits are coordinated with other applicable coverage so that total payments never exceed the actual loss.",
    "The insurer is rated A (Excellent) for financial strength, supporting reliable payment of covered claims.",
    "Disputed decisions can be appealed in writing within sixty days, with a response within thirty days.",
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    // mt19937_64 output is fully specified; distributions are not, so map by hand.
    std::int64_t range(std::int64_t lo, std::int64_t hi, std::int64_t step = 1) {
        if (hi <= lo) return lo;
        auto steps = static_cast<std::uint64_t>((hi - lo) / step + 1);
        return lo + static_cast<std::int64_t>(next() % steps) * step;
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

private:
    std::mt19937_64 engine_;
};

std::string money(std::int64_t dollars) {
    std::string digits = std::to_string(dollars);
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count != 0 && count % 3 == 0) out.push_back(',');
        out.push_back(*it);
        ++count;
    }
    return {out.rbegin(), out.rend()};
}

double cents(double v) {
    return std::round(v * 100.0) / 100.0;
}

}  // namespace

Dataset generate_synthetic_dataset(std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    std::int64_t product_id = 0, coverage_id = 0, term_id = 0, faq_id = 0, tier_id = 0;

    for (std::size_t c = 0; c < kProfiles.size(); ++c) {
        const auto& prof = kProfiles[c];
        std::array<std::size_t, 10> order{};
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (seed != 0) {
            for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
        }

        for (std::size_t k = 0; k < 5; ++k) {
            const std::string name(prof.names[order[k]]);
            const std::int64_t pid = ++product_id;
            const std::int64_t amount = rng.range(prof.amount_lo, prof.amount_hi, prof.amount_step);
            const std::int64_t ded = rng.range(prof.deductible_lo, prof.deductible_hi, prof.deductible_step);
            const int prem = static_cast<int>(rng.range(prof.premium_lo, prof.premium_hi));
            const std::string term(prof.terms[rng.index(prof.terms.size())]);
            const int wait = static_cast<int>(rng.range(0, 90, 15));

            const int n_tiers = (k == 0 || (k == 1 && c < 2)) ? 4 : 3;
            d.products.push_back(Product{
                pid, name, std::string(prof.category),
                fmt::format("{} is a {} insurance product for {}. It combines {} and {} protection for {} with {} "
                            "pricing tiers and a term length of {}.",
                            name, prof.category, prof.audience, prof.coverages[0], prof.coverages[1], prof.insured,
                            n_tiers, term)});

            const int n_cov = (k == 4) ? 5 : 6;
            for (int i = 0; i < n_cov; ++i) {
                const auto base = static_cast<double>(prof.amount_lo) + static_cast<double>(amount - prof.amount_lo) *
                                                                            (1.0 - 0.12 * i);
                d.coverage_details.push_back(CoverageDetail{
                    ++coverage_id, pid, std::string(prof.coverages[i]), cents(std::max(0.0, base)),
                    static_cast<double>(i == 0 ? ded : rng.range(prof.deductible_lo, prof.deductible_hi,
                                                                 prof.deductible_step)),
                    fmt::format("{} applies to {} after a {}-day waiting period; excludes {}.", prof.coverages[i],
                                prof.insured, i == 0 ? 0 : wait, prof.exclusion)});
            }

            d.policy_terms.push_back(PolicyTerm{
                ++term_id, pid, term,
                fmt::format("Renews automatically for another {} term; rate changes capped at {}% per renewal.", term,
                            rng.range(5, 15)),
                fmt::format("Cancel anytime with a {}-day free-look period; pro-rata refund minus a ${} fee.",
                            rng.range(10, 30, 5), rng.range(0, 50, 25))});

            const int n_faqs = (prof.category == "Dental") ? 48 : 50;
            for (int f = 0; f < n_faqs; ++f) {
                const int theme = f % kThemes;
                const int variant = f / kThemes;
                fmt::dynamic_format_arg_store<fmt::format_context> args;
                args.push_back(fmt::arg("p", name));
                args.push_back(fmt::arg("item", prof.claim_item));
                args.push_back(fmt::arg("insured", prof.insured));
                args.push_back(fmt::arg("cov0", prof.coverages[0]));
                args.push_back(fmt::arg("cov1", prof.coverages[1]));
                args.push_back(fmt::arg("cov2", prof.coverages[2]));
                args.push_back(fmt::arg("cov3", prof.coverages[3]));
                args.push_back(fmt::arg("excl", prof.exclusion));
                args.push_back(fmt::arg("term", term));
                args.push_back(fmt::arg("ded", money(ded)));
                args.push_back(fmt::arg("amt", money(amount)));
                args.push_back(fmt::arg("half", money(amount / 2)));
                args.push_back(fmt::arg("oop", money(std::max<std::int64_t>(ded * 3, 1000))));
                args.push_back(fmt::arg("pct", rng.range(70, 90, 10)));
                args.push_back(fmt::arg("days", rng.range(3, 15)));
                args.push_back(fmt::arg("pdays", rng.range(2, 7)));
                args.push_back(fmt::arg("agemin", rng.range(18, 25)));
                args.push_back(fmt::arg("agemax", rng.range(64, 85)));
                args.push_back(fmt::arg("notice", rng.range(15, 60, 15)));
                args.push_back(fmt::arg("cap", rng.range(5, 15)));
                args.push_back(fmt::arg("wait", wait));
                args.push_back(fmt::arg("free", rng.range(10, 30, 5)));
                args.push_back(fmt::arg("fee", rng.range(0, 50, 25)));
                args.push_back(fmt::arg("prem", prem));
                args.push_back(fmt::arg("annual", money(prem * 12 * 95 / 100)));
                args.push_back(fmt::arg("disc", rng.range(5, 25, 5)));
                args.push_back(fmt::arg("rider", rng.range(3, 25)));
                std::string question = fmt::vformat(kQuestions[theme][variant], args);
                std::string answer = fmt::vformat(kAnswerCores[theme], args);
                const std::size_t a = rng.index(kFillers.size());
                std::size_t b = rng.index(kFillers.size() - 1);
                if (b >= a) ++b;
                answer += ' ';
                answer += kFillers[a];
                answer += ' ';
                answer += kFillers[b];
                answer += fmt::format(" Ask about {} when you compare {} options.", name, prof.category);
                d.faqs.push_back(Faq{++faq_id, pid, std::move(question), std::move(answer)});
            }

            static constexpr std::array<std::string_view, 4> kFour = {"Bronze", "Silver", "Gold", "Platinum"};
            static constexpr std::array<std::string_view, 3> kThree = {"Essential", "Standard", "Premier"};
            static constexpr std::array<std::array<int, 2>, 4> kFourAges = {{{18, 30}, {31, 45}, {46, 60}, {61, 75}}};
            static constexpr std::array<std::array<int, 2>, 3> kThreeAges = {{{18, 35}, {36, 55}, {56, 80}}};
            for (int t = 0; t < n_tiers; ++t) {
                const double monthly = cents(prem * (1.0 + 0.35 * t));
                const bool four = n_tiers == 4;
                d.pricing_tiers.push_back(PricingTier{
                    ++tier_id, pid, std::string(four ? kFour[t] : kThree[t]), monthly, cents(monthly * 12 * 0.95),
                    four ? kFourAges[t][0] : kThreeAges[t][0], four ? kFourAges[t][1] : kThreeAges[t][1]});
            }
        }
    }
    return d;
}

}  // namespace salesassist::kb
