#pragma once

#include <filesystem>
#include <string>

#include "itemaudit/preprocess.hpp"

namespace testsupport {

inline std::string data_path(const std::string& name) { return std::string(ITEMAUDIT_DATA_DIR) + "/" + name; }

inline const itemaudit::StoplistSet& default_lists() {
    static const itemaudit::StoplistSet lists = itemaudit::load_stoplists(
        {data_path("stopwords.txt"), data_path("negations.txt"), data_path("units.txt"), data_path("demographic.txt"),
         data_path("highfreq.txt"), data_path("lemmas.tsv")});
    return lists;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("itemaudit-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline const char* kSampleStem =
    "A 67-year-old woman with congenital bicuspid aortic valve is admitted to the hospital because of a 2-day "
    "history of fever and chills. Current medication is lisinopril. Temperature is 38.0\xC2\xB0" "C (100.4\xC2\xB0" "F), "
    "pulse is 90/min, respirations are 20/min, and blood pressure is 110/70 mm Hg. Cardiac examination shows a grade "
    "3/6 systolic murmur that is best heard over the second right intercostal space. Blood culture grows viridans "
    "streptococci susceptible to penicillin. In addition to penicillin, an antibiotic synergistic to penicillin is "
    "administered that may help shorten the duration of this patient's drug treatment. Which of the following is "
    "the most likely mechanism of action of this additional antibiotic on bacteria?";

inline const char* kSampleClean =
    "congenital bicuspid aortic valve admit hospital history chill current medication lisinopril temperature pulse "
    "respiration blood pressure cardiac examination grade systolic murmur well hear second right intercostal space "
    "blood culture grow viridan streptococci susceptible penicillin addition penicillin antibiotic synergistic "
    "penicillin administer help shorten duration drug treatment following likely mechanism action additional "
    "antibiotic bacteria";

} // namespace testsupport
