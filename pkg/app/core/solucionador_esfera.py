# app/core/solucionador_esfera.py
"""
Solucionador espectral de Galerkin para Navier–Stokes (ou Stokes) na esfera
unitária, determinístico ou com ruído aditivo, com livro-razão discreto de
energia.

Passo IMEX de primeira ordem sobre os coeficientes de corrente ψ:

    ψ ← F · (ψ + dt (P f − B(u, u)) + m(t) Σ_j g^j Δβ_j)

com F = exp(−ν l(l+1) dt) (fator integrante) ou 1/(1 + ν l(l+1) dt)
(Euler implícito na difusão). O termo não linear e a força são explícitos e o
ruído entra por Euler–Maruyama.
"""

import functools
import logging
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from app.core.excecoes import ErroConfiguracao, ErroDivergencia, ErroUso
from app.ferramentas.operadores_esfera import (
    CampoTangenteEsfera,
    GradeEsfera,
    SolenoidalEspectral,
    autovalores_stokes,
    obter_grade,
    projetar_leray,
)
from app.ferramentas.ruido import CaminhoWiener, ModeloRuido

# Configura o logger para este módulo
logger = logging.getLogger(__name__)

LMAX_MAXIMO_NSE = 15

CampoForcamento = Union[SolenoidalEspectral, CampoTangenteEsfera]
Forcamento = Union[None, CampoForcamento, Callable[[float], Optional[CampoForcamento]]]


class ModoDinamica(str, Enum):
    STOKES = "STOKES"
    NSE = "NSE"


class EsquemaTemporal(str, Enum):
    FATOR_INTEGRANTE = "INTEGRATING_FACTOR"
    IMEX_EULER = "IMEX_EULER"


@dataclass(frozen=True)
class LivroEnergia:
    """
    Termos acumulados do balanço de energia (regra do ponto à esquerda).

    Attributes:
        dissipacao: 2ν ∫ ‖curl u‖² ds.
        trabalho_forcamento: 2 ∫ (f, u) ds.
        forcamento_vlinha: ∫ ‖f‖²_{V′} ds, com ‖f‖_{V′} ≤ ‖A^{-1/2} P f‖.
        variacao_quadratica: ∫ ‖G‖²_{HS} ds.
        martingal: 2 Σ (g^j, u) Δβ_j.
    """

    dissipacao: float = 0.0
    trabalho_forcamento: float = 0.0
    forcamento_vlinha: float = 0.0
    variacao_quadratica: float = 0.0
    martingal: float = 0.0

    def acumular(self, **parcelas: float) -> "LivroEnergia":
        return replace(self, **{nome: getattr(self, nome) + valor for nome, valor in parcelas.items()})

    def balanco(self, energia_inicial: float) -> float:
        """Energia prevista pela identidade: ‖u₀‖² − D + W + M + QV."""
        return (
            energia_inicial
            - self.dissipacao
            + self.trabalho_forcamento
            + self.martingal
            + self.variacao_quadratica
        )

    def para_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class ConfiguracaoSolucionadorEsfera:
    """
    Parâmetros de uma integração na esfera.

    Attributes:
        nu: Viscosidade ν > 0.
        dt: Passo de tempo.
        t_final: Horizonte T (T = 0 devolve apenas u₀).
        lmax: Truncamento espectral.
        forcamento: Campo constante ou função de t; None para f = 0.
        ruido: Modelo de ruído; None para o caso determinístico.
        esquema: Tratamento da difusão.
        modo: STOKES desliga o termo não linear.
        passos_por_amostra: Intervalo de amostragem da trajetória.
    """

    nu: float
    dt: float
    t_final: float
    lmax: int
    forcamento: Forcamento = None
    ruido: Optional[ModeloRuido] = None
    esquema: EsquemaTemporal = EsquemaTemporal.FATOR_INTEGRANTE
    modo: ModoDinamica = ModoDinamica.NSE
    passos_por_amostra: int = 1
    nlat: Optional[int] = None
    nlon: Optional[int] = None

    def __post_init__(self):
        self.esquema = EsquemaTemporal(self.esquema)
        self.modo = ModoDinamica(self.modo)
        if self.nu <= 0:
            raise ErroConfiguracao(f"Viscosidade deve ser positiva (recebida {self.nu}).")
        if self.dt <= 0:
            raise ErroConfiguracao(f"dt deve ser positivo (recebido {self.dt}).")
        if self.t_final < 0:
            raise ErroConfiguracao(f"t_final não pode ser negativo (recebido {self.t_final}).")
        if self.lmax < 1:
            raise ErroConfiguracao(f"lmax deve ser ≥ 1 (recebido {self.lmax}).")
        if self.modo is ModoDinamica.NSE and self.lmax > LMAX_MAXIMO_NSE:
            raise ErroConfiguracao(f"Modo NSE limitado a lmax ≤ {LMAX_MAXIMO_NSE}.")
        if self.passos_por_amostra < 1:
            raise ErroConfiguracao("passos_por_amostra deve ser ≥ 1.")
        if self.ruido is not None and self.ruido.grade.lmax != self.lmax:
            raise ErroConfiguracao("Modelo de ruído com lmax diferente do solucionador.")

    @functools.cached_property
    def grade(self) -> GradeEsfera:
        if self.ruido is not None:
            return self.ruido.grade
        return obter_grade(self.lmax, self.nlat, self.nlon)

    @property
    def numero_passos(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def estocastico(self) -> bool:
        return self.ruido is not None and self.ruido.N > 0

    @functools.cached_property
    def fator_difusao(self) -> np.ndarray:
        escala = self.nu * autovalores_stokes(self.lmax) * self.dt
        if self.esquema is EsquemaTemporal.FATOR_INTEGRANTE:
            return np.exp(-escala)
        return 1.0 / (1.0 + escala)

    @functools.cached_property
    def matriz_ruido(self) -> np.ndarray:
        if self.ruido is None:
            return np.zeros((0, self.grade.numero_coeficientes))
        return self.ruido.matriz()

    def corrente_forcamento(self, t: float) -> np.ndarray:
        """Coeficientes de corrente de P f(t)."""
        valor = self.forcamento(t) if callable(self.forcamento) else self.forcamento
        if valor is None:
            return np.zeros(self.grade.numero_coeficientes)
        if isinstance(valor, CampoTangenteEsfera):
            valor = projetar_leray(valor)
        if valor.grade.lmax != self.lmax:
            raise ErroConfiguracao("Forçamento com lmax diferente do solucionador.")
        psi = np.array(valor.psi)
        psi[0] = 0.0
        return psi


@dataclass(frozen=True)
class EstadoEsfera:
    t: float
    u: SolenoidalEspectral
    livro: LivroEnergia = field(default_factory=LivroEnergia)
    passo: int = 0


@dataclass(frozen=True, eq=False)
class TrajetoriaEsfera:
    """Estados amostrados, livros-razão correspondentes e diagnósticos finais."""

    nu: float
    tempos: List[float]
    estados: List[SolenoidalEspectral]
    livros: List[LivroEnergia]
    energia_inicial: float
    deterministica: bool
    residuo_energia: float
    identidade_ok: bool

    @property
    def final(self) -> SolenoidalEspectral:
        return self.estados[-1]

    @property
    def livro_final(self) -> LivroEnergia:
        return self.livros[-1]

    def energias(self) -> np.ndarray:
        return np.array([_energia(u) for u in self.estados])

    def normas_rotacional(self) -> np.ndarray:
        return np.sqrt([_enstrofia(u) for u in self.estados])

    def para_linhas(self) -> List[Dict[str, float]]:
        """Linhas da exportação CSV, uma por amostra."""
        linhas = []
        for t, energia, rot, livro in zip(self.tempos, self.energias(), self.normas_rotacional(), self.livros):
            linhas.append(
                {
                    "t": t,
                    "norma_l2": float(np.sqrt(energia)),
                    "norma_rot": float(rot),
                    "dissipacao": livro.dissipacao,
                    "trabalho_forcamento": livro.trabalho_forcamento,
                    "variacao_quadratica": livro.variacao_quadratica,
                    "martingal": livro.martingal,
                }
            )
        return linhas


def _energia(u: SolenoidalEspectral) -> float:
    return float(np.sum(autovalores_stokes(u.grade.lmax) * u.psi**2))


def _enstrofia(u: SolenoidalEspectral) -> float:
    return float(np.sum(autovalores_stokes(u.grade.lmax) ** 2 * u.psi**2))


# --- Termo não linear ---


def termo_nao_linear(u: SolenoidalEspectral) -> SolenoidalEspectral:
    """
    P(∇′_u u) em forma rotacional.

    Na grade com quadratura exata para produtos cúbicos,
    ∇′_u u = ∇′(|u|²/2) + ζ n × u com ζ = curl′u; o gradiente some na
    projeção e (ζ n × u)·u = 0 ponto a ponto, então (B(u, u), u) = 0 até o
    arredondamento.
    """
    grade = u.grade
    fina = obter_grade(grade.lmax)
    autovalores = autovalores_stokes(grade.lmax)
    if not np.any(u.psi):
        return SolenoidalEspectral.zero(grade)

    u_lambda, u_phi = fina.sintetizar_tangente(np.zeros_like(u.psi), u.psi)
    vorticidade = fina.sintetizar_valores(autovalores * u.psi)
    _, psi = fina.analisar_tangente(-vorticidade * u_phi, vorticidade * u_lambda)
    psi[0] = 0.0
    return SolenoidalEspectral(grade, psi)


def razao_neutralidade(u: SolenoidalEspectral, nu: float) -> float:
    """|(B(u, u), u)| relativo à dissipação 2ν‖curl′u‖²."""
    dissipacao = 2.0 * nu * _enstrofia(u)
    if dissipacao == 0.0:
        return 0.0
    contribuicao = float(np.dot(autovalores_stokes(u.grade.lmax) * termo_nao_linear(u).psi, u.psi))
    return abs(contribuicao) / dissipacao


# --- Integração ---


def validar_incremento(ruido, dW: Optional[np.ndarray]) -> np.ndarray:
    """Confere a presença e o tamanho de dW contra o modelo de ruído (ou sua ausência)."""
    N = 0 if ruido is None else ruido.N
    if ruido is None:
        if dW is not None and np.size(dW) > 0:
            raise ErroUso("Incremento de ruído fornecido sem modelo de ruído.", "IncrementoInesperado")
        return np.zeros(0)
    if dW is None:
        if N == 0:
            return np.zeros(0)
        raise ErroUso("Modelo de ruído exige incremento dW.", "IncrementoAusente")
    dW = np.asarray(dW, dtype=float)
    if dW.shape != (N,):
        raise ErroUso(f"Incremento com forma {dW.shape}; esperado ({N},).", "IncrementoInvalido")
    return dW


def passo(
    estado: EstadoEsfera, config: ConfiguracaoSolucionadorEsfera, dW: Optional[np.ndarray] = None
) -> EstadoEsfera:
    """
    Avança um passo de tempo.

    Raises:
        ErroUso: dW presente sem ruído, ausente com ruído ou de tamanho errado.
        ErroDivergencia: Estado não finito após o passo.
    """
    dW = validar_incremento(config.ruido, dW)
    dt = config.dt
    t = estado.t
    autovalores = autovalores_stokes(config.lmax)
    psi = estado.u.psi

    forca = config.corrente_forcamento(t)
    explicito = psi + dt * forca
    if config.modo is ModoDinamica.NSE:
        explicito = explicito - dt * termo_nao_linear(estado.u).psi

    martingal = 0.0
    variacao = 0.0
    if dW.size:
        fator = config.ruido.fator(t)
        G = config.matriz_ruido
        explicito = explicito + fator * (dW @ G)
        martingal = 2.0 * fator * float(dW @ (G @ (autovalores * psi)))
        variacao = dt * fator**2 * float(np.sum(autovalores * G**2))

    novo = config.fator_difusao * explicito
    novo[0] = 0.0
    if not np.all(np.isfinite(novo)):
        raise ErroDivergencia(f"Estado não finito em t={t + dt:.6g}.", estado.passo + 1)

    livro = estado.livro.acumular(
        dissipacao=2.0 * config.nu * dt * _enstrofia(estado.u),
        trabalho_forcamento=2.0 * dt * float(np.dot(autovalores * forca, psi)),
        forcamento_vlinha=dt * float(np.sum(forca[1:] ** 2)),
        variacao_quadratica=variacao,
        martingal=martingal,
    )
    return EstadoEsfera(t + dt, SolenoidalEspectral(estado.u.grade, novo), livro, estado.passo + 1)


def _validar_caminho(config: ConfiguracaoSolucionadorEsfera, caminho: Optional[CaminhoWiener]) -> None:
    if not config.estocastico:
        if caminho is not None and caminho.N > 0:
            raise ErroUso("Caminho de Wiener fornecido para execução determinística.", "IncrementoInesperado")
        return
    if caminho is None:
        raise ErroUso("Execução estocástica exige um caminho de Wiener.", "IncrementoAusente")
    if caminho.N != config.ruido.N:
        raise ErroUso(f"Caminho com N={caminho.N}; modelo com N={config.ruido.N}.", "IncrementoInvalido")
    if not np.isclose(caminho.dt, config.dt, rtol=1e-12, atol=0.0):
        raise ErroUso(f"Caminho com dt={caminho.dt}; solucionador com dt={config.dt}.", "IncrementoInvalido")
    if caminho.passos < config.numero_passos:
        raise ErroUso(
            f"Caminho com {caminho.passos} passos; são necessários {config.numero_passos}.", "IncrementoInvalido"
        )


def limite_residuo_energia(config: ConfiguracaoSolucionadorEsfera, energia_inicial: float) -> float:
    """Cota O(dt) do resíduo da identidade de energia para o esquema de primeira ordem."""
    escala = config.nu * autovalores_stokes(config.lmax)[-1]
    return 4.0 * escala**2 * config.t_final * config.dt * energia_inicial + 1e-12 * max(energia_inicial, 1.0)


def executar(
    config: ConfiguracaoSolucionadorEsfera,
    u0: SolenoidalEspectral,
    caminho: Optional[CaminhoWiener] = None,
) -> TrajetoriaEsfera:
    """
    Integra de 0 a T e devolve a trajetória amostrada.

    Para execuções determinísticas sem forçamento o resíduo da identidade de
    energia é comparado com a cota O(dt); acima dela registra-se um aviso e
    identidade_ok fica falso.

    Raises:
        ErroConfiguracao: u₀ fora da grade do solucionador.
        ErroUso: Caminho ausente, inesperado ou incompatível.
        ErroDivergencia: Propagado do passo.
    """
    if u0.grade.lmax != config.lmax:
        raise ErroConfiguracao(f"u₀ com lmax={u0.grade.lmax}; solucionador com lmax={config.lmax}.")
    _validar_caminho(config, caminho)
    u0 = u0.sem_modo_medio()

    estado = EstadoEsfera(0.0, u0)
    tempos, estados, livros = [0.0], [u0], [estado.livro]
    total = config.numero_passos
    logger.debug(f"Esfera: {total} passos, modo={config.modo.value}, esquema={config.esquema.value}")

    for k in range(total):
        dW = caminho.incremento(k) if config.estocastico else None
        estado = passo(estado, config, dW)
        if estado.passo % config.passos_por_amostra == 0 or estado.passo == total:
            tempos.append(estado.t)
            estados.append(estado.u)
            livros.append(estado.livro)

    energia_inicial = _energia(u0)
    residuo = _energia(estado.u) - estado.livro.balanco(energia_inicial)
    deterministica = not config.estocastico and config.forcamento is None
    identidade_ok = True
    if deterministica:
        limite = limite_residuo_energia(config, energia_inicial)
        identidade_ok = abs(residuo) <= limite
        if not identidade_ok:
            logger.warning(f"Resíduo da identidade de energia {residuo:.3e} acima da cota {limite:.3e}")

    return TrajetoriaEsfera(
        nu=config.nu,
        tempos=tempos,
        estados=estados,
        livros=livros,
        energia_inicial=energia_inicial,
        deterministica=deterministica,
        residuo_energia=float(residuo),
        identidade_ok=identidade_ok,
    )


# --- Diagnósticos ---


def residuo_identidade_energia(trajetoria: TrajetoriaEsfera) -> float:
    """‖u(T)‖² − (‖u₀‖² − D + W + M + QV) da trajetória."""
    return _energia(trajetoria.final) - trajetoria.livro_final.balanco(trajetoria.energia_inicial)


def verificar_desigualdade_energia(trajetoria: TrajetoriaEsfera) -> Dict[str, float]:
    """
    Confere ‖u(t)‖² + ν∫‖curl′u‖² ≤ ‖u₀‖² + (1/ν)∫‖f‖²_{V′} + K ∫‖G‖²_{HS}.

    Returns:
        {'folga_maxima', 'k_empirico', 'ok'}: folga_maxima é o maior excesso
        do lado esquerdo sobre os termos de dados; k_empirico é o menor K que
        cobre esse excesso pela variação quadrática (0 se não houver ruído).
    """
    nu = trajetoria.nu
    folgas, razoes = [], []
    for u, livro in zip(trajetoria.estados, trajetoria.livros):
        esquerdo = _energia(u) + 0.5 * livro.dissipacao
        folga = esquerdo - (trajetoria.energia_inicial + livro.forcamento_vlinha / nu)
        folgas.append(folga)
        if livro.variacao_quadratica > 0:
            razoes.append(folga / livro.variacao_quadratica)
    folga_maxima = float(max(folgas))
    k_empirico = float(max(max(razoes), 0.0)) if razoes else 0.0
    tolerancia = 2.0 * abs(trajetoria.residuo_energia) + 1e-10 * max(trajetoria.energia_inicial, 1.0)
    ok = bool(np.isfinite(folga_maxima)) and (bool(razoes) or folga_maxima <= tolerancia)
    return {"folga_maxima": folga_maxima, "k_empirico": k_empirico, "ok": ok}


def diagnostico_equicontinuidade(trajetoria: TrajetoriaEsfera) -> float:
    """sup sobre pares de amostras de ‖u(t+θ) − u(t)‖_{D(A⁻¹)} / θ^{1/2}."""
    if len(trajetoria.estados) < 2:
        return 0.0
    lmax = trajetoria.final.grade.lmax
    autovalores = autovalores_stokes(lmax)
    pesos = np.zeros_like(autovalores)
    pesos[1:] = 1.0 / autovalores[1:]
    correntes = np.stack([u.psi for u in trajetoria.estados])
    tempos = np.asarray(trajetoria.tempos)
    maior = 0.0
    for defasagem in range(1, len(tempos)):
        diferencas = correntes[defasagem:] - correntes[:-defasagem]
        theta = tempos[defasagem:] - tempos[:-defasagem]
        normas = np.sqrt(np.sum(pesos * diferencas**2, axis=1))
        maior = max(maior, float(np.max(normas / np.sqrt(theta))))
    return maior
