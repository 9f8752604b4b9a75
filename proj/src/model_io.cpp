#include "windcast/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "windcast/errors.hpp"
#include "windcast/forest.hpp"
#include "windcast/svr.hpp"

namespace windcast {

std::unique_ptr<Regressor> load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad model file '" + path + "': " + e.what());
    }
    if (j.value("format", "") != "windcast-model")
        throw DataError("'" + path + "' is not a windcast model file");
    const std::string kind = j.value("model", "");
    if (kind == "svr") return std::make_unique<SvrModel>(load_svr(path));
    if (kind == "forest") return std::make_unique<ForestModel>(load_forest(path));
    throw DataError("unknown model kind '" + kind + "' in '" + path + "'");
}

}  // namespace windcast
