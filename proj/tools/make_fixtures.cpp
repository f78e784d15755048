// Writes the example model files into the directory given as argv[1].

#include "tslift/io.hpp"
#include "tslift/reference_models.hpp"

#include <iostream>

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <output-dir>\n";
        return 1;
    }
    const std::filesystem::path dir = argv[1];
    using tslift::io::ModelFile;

    ModelFile ex1;
    ex1.model = tslift::reference::example1();
    ex1.metadata["description"] = "companion drift, rank-2 noise, 10 outputs H(k,j)=|k-j|+1";
    tslift::io::save_model(dir / "example1_ct.json", ex1);

    ModelFile fine;
    fine.model = tslift::reference::example2_fine();
    fine.metadata["description"] = "example1 drift discretized as expm(0.5 F) with noise gain G";
    tslift::io::save_model(dir / "example2_fine.json", fine);

    ModelFile coarse;
    coarse.model = tslift::reference::example2_coarse();
    coarse.metadata["description"] = "example2_fine observed every 5 steps";
    tslift::io::save_model(dir / "example2_coarse.json", coarse);
    return 0;
}
