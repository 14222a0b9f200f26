#include "cropdiv/types.hpp"

namespace cropdiv {

ClassScheme::ClassScheme(std::vector<std::pair<ClassCode, std::string>> classes)
    : lookup_(65536, -1) {
    if (classes.empty()) {
        throw FormatError("class scheme must contain at least one class");
    }
    codes_.reserve(classes.size());
    labels_.reserve(classes.size());
    for (auto& [code, label] : classes) {
        if (lookup_[code] >= 0) {
            throw FormatError("duplicate class code " + std::to_string(code));
        }
        lookup_[code] = static_cast<std::int32_t>(codes_.size());
        codes_.push_back(code);
        labels_.push_back(std::move(label));
    }
}

ClassScheme ClassScheme::eu_cropmap_2018() {
    return ClassScheme({
        {211, "Common wheat"},
        {212, "Durum wheat"},
        {213, "Barley"},
        {214, "Rye"},
        {215, "Oats"},
        {216, "Maize"},
        {217, "Rice"},
        {218, "Triticale"},
        {219, "Other cereals"},
        {221, "Potatoes"},
        {222, "Sugar beet"},
        {223, "Other root crops"},
        {230, "Other non permanent industrial crops"},
        {231, "Sunflower"},
        {232, "Rape and turnip rape"},
        {233, "Soya"},
        {240, "Dry pulses, vegetables and flowers"},
        {250, "Other fodder crops (excl. temp. grasslands)"},
        {290, "Bare arable land"},
    });
}

ClassScheme ClassScheme::without(ClassCode code) const {
    std::vector<std::pair<ClassCode, std::string>> kept;
    kept.reserve(codes_.size());
    for (std::size_t j = 0; j < codes_.size(); ++j) {
        if (codes_[j] != code) {
            kept.emplace_back(codes_[j], labels_[j]);
        }
    }
    return ClassScheme(std::move(kept));
}

} // namespace cropdiv
