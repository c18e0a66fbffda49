"""Reference parameter sets for a 0.5 mm YIG sphere in copper box cavities."""

from .hybrid import (
    CavityGeometry,
    CavityMode,
    HybridSystem,
    MagnonMode,
    QubitParams,
    SphereSample,
)
from .units import GHz, MHz

# dressed qubit frequency measured in the multimode cavity
DRESSED_QUBIT_FREQUENCY = 8.158 * GHz
# bare qubit-to-TE102 detuning
BARE_DETUNING_102 = 183 * MHz
# measured cavity-mediated qubit-magnon coupling
MEASURED_G_QM = 11.4 * MHz


def magnon_cavity_system(f_m=None):
    """Single TE101 mode strongly coupled to the Kittel mode."""
    f_c = 10.565 * GHz
    mode = CavityMode(
        p=1,
        f_c=f_c,
        kappa_in=0.5 * MHz,
        kappa_out=0.5 * MHz,
        kappa_int=1.7 * MHz,
        g_m=47 * MHz,
    )
    return HybridSystem(
        modes=(mode,),
        magnon=MagnonMode(f_m=f_c if f_m is None else f_m, gamma_m=1.1 * MHz),
        sample=SphereSample(diameter=0.5e-3),
        geometry=CavityGeometry(width=22e-3, length=18e-3, height=3e-3, mode_indices=(1,)),
    )


def qubit_magnon_system(f_m=DRESSED_QUBIT_FREQUENCY):
    """Three-mode cavity with a transmon; TE102 couples qubit and magnon, TE103 reads out.

    Couplings not quoted for a mode are set to zero.
    """
    f_102 = 8.488 * GHz
    modes = (
        CavityMode(p=1, f_c=6.987 * GHz),
        CavityMode(
            p=2,
            f_c=f_102,
            kappa_in=0.55 * MHz,
            kappa_int=1.73 * MHz,
            g_q=117 * MHz,
            g_m=21 * MHz,
        ),
        CavityMode(
            p=3,
            f_c=10.461 * GHz,
            kappa_in=2.75 * MHz,
            kappa_int=1.26 * MHz,
            g_q=141 * MHz,
        ),
    )
    return HybridSystem(
        modes=modes,
        qubit=QubitParams(
            f_q=f_102 - BARE_DETUNING_102, alpha=-158 * MHz, gamma_q=2.0 * MHz, levels=3
        ),
        magnon=MagnonMode(f_m=f_m, gamma_m=1.8 * MHz),
        sample=SphereSample(diameter=0.5e-3),
        geometry=CavityGeometry(width=25e-3, length=53e-3, height=3e-3, mode_indices=(1, 2, 3)),
        readout_mode=3,
    )
