#pragma once

// Gauss-Legendre nodes and weights on [-1, 1].

namespace fraclinic::detail {

inline constexpr double kGlNodes16[16] = {
    -0.98940093499164994, -0.9445750230732326, -0.86563120238783176, -0.755404408355003,
    -0.61787624440264377, -0.45801677765722743, -0.28160355077925892, -0.095012509837637454,
    0.095012509837637454, 0.28160355077925892, 0.45801677765722743, 0.61787624440264377,
    0.755404408355003, 0.86563120238783176, 0.9445750230732326, 0.98940093499164994,
};

inline constexpr double kGlWeights16[16] = {
    0.027152459411756466, 0.06225352393864763, 0.095158511682492314, 0.12462897125553363,
    0.14959598881657638, 0.16915651939500212, 0.18260341504492328, 0.18945061045506811,
    0.18945061045506811, 0.18260341504492328, 0.16915651939500212, 0.14959598881657638,
    0.12462897125553363, 0.095158511682492314, 0.06225352393864763, 0.027152459411756466,
};

inline constexpr double kGlNodes24[24] = {
    -0.99518721999702131, -0.97472855597130947, -0.9382745520027328, -0.88641552700440107,
    -0.82000198597390295, -0.74012419157855436, -0.64809365193697555, -0.54542147138883945,
    -0.43379350762604518, -0.31504267969616334, -0.19111886747361626, -0.06405689286260563,
    0.06405689286260563, 0.19111886747361626, 0.31504267969616334, 0.43379350762604518,
    0.54542147138883945, 0.64809365193697555, 0.74012419157855436, 0.82000198597390295,
    0.88641552700440107, 0.9382745520027328, 0.97472855597130947, 0.99518721999702131,
};

inline constexpr double kGlWeights24[24] = {
    0.012341229799988262, 0.028531388628932657, 0.044277438817420182, 0.05929858491543661,
    0.073346481411080175, 0.086190161531953552, 0.097618652104114051, 0.10744427011596587,
    0.11550566805372539, 0.12167047292780316, 0.12583745634682822, 0.12793819534675197,
    0.12793819534675197, 0.12583745634682822, 0.12167047292780316, 0.11550566805372539,
    0.10744427011596587, 0.097618652104114051, 0.086190161531953552, 0.073346481411080175,
    0.05929858491543661, 0.044277438817420182, 0.028531388628932657, 0.012341229799988262,
};

inline constexpr double kGlNodes32[32] = {
    -0.99726386184948157, -0.98561151154526838, -0.96476225558750639, -0.93490607593773967,
    -0.89632115576605209, -0.84936761373256986, -0.79448379596794227, -0.73218211874028971,
    -0.66304426693021523, -0.5877157572407623, -0.50689990893222947, -0.42135127613063539,
    -0.33186860228212767, -0.23928736225213709, -0.14447196158279643, -0.048307665687738338,
    0.048307665687738338, 0.14447196158279643, 0.23928736225213709, 0.33186860228212767,
    0.42135127613063539, 0.50689990893222947, 0.5877157572407623, 0.66304426693021523,
    0.73218211874028971, 0.79448379596794227, 0.84936761373256986, 0.89632115576605209,
    0.93490607593773967, 0.96476225558750639, 0.98561151154526838, 0.99726386184948157,
};

inline constexpr double kGlWeights32[32] = {
    0.0070186100094744202, 0.016274394730904029, 0.025392065309261264, 0.034273862913020543,
    0.042835898022227203, 0.050998059262376251, 0.058684093478535787, 0.065822222776361336,
    0.072345794108848491, 0.078193895787070158, 0.083311924226946471, 0.0876520930044037,
    0.091173878695763641, 0.093844399080804414, 0.095638720079274653, 0.09654008851472759,
    0.09654008851472759, 0.095638720079274653, 0.093844399080804414, 0.091173878695763641,
    0.0876520930044037, 0.083311924226946471, 0.078193895787070158, 0.072345794108848491,
    0.065822222776361336, 0.058684093478535787, 0.050998059262376251, 0.042835898022227203,
    0.034273862913020543, 0.025392065309261264, 0.016274394730904029, 0.0070186100094744202,
};

inline constexpr double kGlNodes64[64] = {
    -0.99930504173577206, -0.99634011677195522, -0.99101337147674418, -0.98333625388462598,
    -0.97332682778991098, -0.96100879965205377, -0.94641137485840277, -0.92956917213193957,
    -0.91052213707850282, -0.88931544599511403, -0.86599939815409277, -0.84062929625258032,
    -0.81326531512279754, -0.78397235894334139, -0.75281990726053194, -0.71988185017161088,
    -0.68523631305423316, -0.64896547125465731, -0.61115535517239328, -0.57189564620263389,
    -0.53127946401989457, -0.48940314570705301, -0.44636601725346414, -0.40227015796399163,
    -0.35722015833766818, -0.31132287199021091, -0.26468716220876742, -0.21742364374000703,
    -0.16964442042399283, -0.12146281929612057, -0.072993121787799042, -0.024350292663424374,
    0.024350292663424374, 0.072993121787799042, 0.12146281929612057, 0.16964442042399283,
    0.21742364374000703, 0.26468716220876742, 0.31132287199021091, 0.35722015833766818,
    0.40227015796399163, 0.44636601725346414, 0.48940314570705301, 0.53127946401989457,
    0.57189564620263389, 0.61115535517239328, 0.64896547125465731, 0.68523631305423316,
    0.71988185017161088, 0.75281990726053194, 0.78397235894334139, 0.81326531512279754,
    0.84062929625258032, 0.86599939815409277, 0.88931544599511403, 0.91052213707850282,
    0.92956917213193957, 0.94641137485840277, 0.96100879965205377, 0.97332682778991098,
    0.98333625388462598, 0.99101337147674418, 0.99634011677195522, 0.99930504173577206,
};

inline constexpr double kGlWeights64[64] = {
    0.0017832807216983117, 0.0041470332605621704, 0.006504457968979944, 0.0088467598263634994,
    0.011168139460130634, 0.013463047896718951, 0.01572603047602452, 0.017951715775696795,
    0.020134823153530858, 0.022270173808383264, 0.024352702568710975, 0.026377469715054197,
    0.028339672614259487, 0.03023465707240202, 0.032057928354851377, 0.033805161837141447,
    0.03547221325688267, 0.037055128540240019, 0.038550153178615335, 0.039953741132720412,
    0.041262563242623396, 0.042473515123653278, 0.043583724529323312, 0.044590558163756372,
    0.045491627927417927, 0.046284796581314465, 0.046968182816209854, 0.047540165714830315,
    0.047999388596458248, 0.048344762234802906, 0.048575467441503387, 0.048690957009139627,
    0.048690957009139627, 0.048575467441503387, 0.048344762234802906, 0.047999388596458248,
    0.047540165714830315, 0.046968182816209854, 0.046284796581314465, 0.045491627927417927,
    0.044590558163756372, 0.043583724529323312, 0.042473515123653278, 0.041262563242623396,
    0.039953741132720412, 0.038550153178615335, 0.037055128540240019, 0.03547221325688267,
    0.033805161837141447, 0.032057928354851377, 0.03023465707240202, 0.028339672614259487,
    0.026377469715054197, 0.024352702568710975, 0.022270173808383264, 0.020134823153530858,
    0.017951715775696795, 0.01572603047602452, 0.013463047896718951, 0.011168139460130634,
    0.0088467598263634994, 0.006504457968979944, 0.0041470332605621704, 0.0017832807216983117,
};

}  // namespace fraclinic::detail
