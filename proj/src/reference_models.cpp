#include "tslift/reference_models.hpp"

#include "tslift/resample.hpp"

#include <cstdlib>

namespace tslift::reference {

CtModel example1() {
    CtModel m;
    m.F.resize(4, 4);
    m.F << 0, 1, 0, 0,
           0, 0, 1, 0,
           0, 0, 0, 1,
          -2, -5, -6, -4;
    m.G.resize(4, 2);
    m.G << 1, -1,
           1, -1,
           1, -1,
           1, 1;
    m.H.resize(10, 4);
    for (int k = 0; k < 10; ++k) {
        for (int j = 0; j < 4; ++j) m.H(k, j) = std::abs(k - j) + 1;
    }
    return m;
}

DtModel example2_fine() {
    const CtModel ct = example1();
    DtModel m;
    m.A = expm(ct.F, 0.5);
    m.B = ct.G;
    m.C = ct.H;
    m.D = Matrix::Zero(ct.H.rows(), ct.G.cols());
    m.step = 0.5;
    m.scale = Scale::Fine;
    return m;
}

DtModel example2_coarse() { return subsample(example2_fine(), 5); }

}  // namespace tslift::reference
