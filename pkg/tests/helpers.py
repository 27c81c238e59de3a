from flexqnet.hardware import Detector, DwdmModel, WssModel
from flexqnet.network import NetworkModel, User
from flexqnet.spectrum import BiphotonSpectrum, carve_grid


def ideal_detector(efficiency=1.0, duty=1.0, dark=0.0, jitter=0.0):
    return Detector(
        efficiency=efficiency, duty_cycle=duty, dark_rate=dark, jitter_fwhm_ps=jitter
    )


def uniform_network(
    user_specs,
    n_channels=4,
    flux_per_channel=1000.0,
    insertion_loss_db=0.0,
    gating="synchronized",
    window_ps=1024,
    span_ps=60_000,
    offsets_ps=None,
):
    """Network whose channels all carry (almost exactly) the same flux.

    A first null far beyond the grid makes the density flat to ~1e-13, so
    channel fluxes equal total * width / (first_null / 2) to machine
    precision for test arithmetic.
    """
    width = 24.0
    first_null = 1e9
    total = flux_per_channel * (first_null / 2.0) / width
    spectrum = BiphotonSpectrum(
        first_null_detuning_ghz=first_null,
        stopband_halfwidth_ghz=0.0,
        total_pair_flux=total,
    )
    users = [
        User(name=name, detector=det, path_loss_db=loss)
        for name, det, loss in user_specs
    ]
    wss = WssModel(
        port_count=max(4, len(users)),
        insertion_loss_db=insertion_loss_db,
        resolution_ghz=1.0,
        addressability_ghz=1.0,
        total_bandwidth_ghz=1e9,
    )
    return NetworkModel(
        users=users,
        wss=wss,
        dwdm=DwdmModel(),
        spectrum=spectrum,
        channels=carve_grid(spectrum, width, n_channels),
        gating=gating,
        window_ps=window_ps,
        histogram_span_ps=span_ps,
        offsets_ps=offsets_ps or {},
    )
