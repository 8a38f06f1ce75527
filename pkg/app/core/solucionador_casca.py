# app/core/solucionador_casca.py
"""
Solucionador do sistema 3D na casca Q_ε com condições de contorno livres
(u·n = 0 e curl u × n = 0), nos modos Stokes e Navier–Stokes.

O estado são os coeficientes (c_T, c_P) na autobase de Stokes de
`BaseCasca`; como A_ε é diagonal nessa base, a parte implícita de cada passo
é um fator por coeficiente e as condições de contorno valem por construção.
"""

import functools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.special import roots_legendre

from app.core.base_casca import BaseCasca, Coeficientes, obter_base
from app.core.excecoes import ErroConfiguracao, ErroConsistencia, ErroDivergencia, ErroUso
from app.core.solucionador_esfera import (
    LMAX_MAXIMO_NSE,
    EsquemaTemporal,
    LivroEnergia,
    ModoDinamica,
    validar_incremento,
)
from app.ferramentas.operadores_casca import (
    CampoVetorialCasca,
    DecomposicaoCasca,
    GeometriaCasca,
    TipoDiferencial,
    decompor,
    diferencial_casca,
)
from app.ferramentas.operadores_esfera import (
    GradeEsfera,
    SolenoidalEspectral,
    autovalores_stokes,
    obter_grade,
)
from app.ferramentas.ruido import CaminhoWiener, RuidoCasca

# Configura o logger para este módulo
logger = logging.getLogger(__name__)

ForcamentoCasca = Union[None, CampoVetorialCasca, Callable[[float], Optional[CampoVetorialCasca]]]


class FormaNaoLinear(str, Enum):
    ADVECTIVA = "ADVECTIVE"
    ROTACIONAL = "ROTATIONAL"


# --- Operador de Stokes ---


def _potenciais_nodais(u: CampoVetorialCasca) -> Tuple[np.ndarray, np.ndarray]:
    """S = r·ψ e Q = r²(u_r)_lm/l(l+1) nos nós radiais, forma (nr, (lmax+1)²)."""
    geo = u.geometria
    grade = geo.grade
    r = geo.nos_radiais[:, None]
    autovalores = autovalores_stokes(grade.lmax)
    _, psi = grade.analisar_tangente(u.u_lambda, u.u_phi)
    a_r = grade.analisar_valores(u.u_r)
    Q = np.divide(r**2 * a_r, autovalores, out=np.zeros_like(a_r), where=autovalores > 0)
    return r * psi, Q


def residuos_contorno(u: CampoVetorialCasca) -> Dict[str, float]:
    """
    Resíduos relativos das condições livres nas duas paredes.

    As linhas de contorno da base (S′ = 0; Q = 0 e Q″ = 0) são aplicadas aos
    potenciais nodais do campo, polinomiais em r para campos da base.

    Raises:
        ErroConfiguracao: Menos nós radiais que a base exige.
    """
    S, Q = _potenciais_nodais(u)
    linhas = obter_base(u.geometria).linhas_contorno
    escala = max(float(np.max(np.abs(S))), float(np.max(np.abs(Q))), 1e-300)

    def relativo(bloco: np.ndarray, potencial: np.ndarray) -> float:
        return float(np.max(np.abs(bloco @ potencial))) / (float(np.max(np.abs(bloco))) * escala)

    return {
        "normal": relativo(linhas["poloidal"][:2], Q),
        "tangencial": max(relativo(linhas["toroidal"], S), relativo(linhas["poloidal"][2:], Q)),
    }


def aplicar_stokes_eps(u: CampoVetorialCasca, tolerancia: float = 1e-6) -> CampoVetorialCasca:
    """
    A_ε u = curl curl u pela diferenciação da casca.

    Raises:
        ErroConsistencia: u viola as condições de contorno livres além da tolerância.
    """
    residuos = residuos_contorno(u)
    if max(residuos.values()) > tolerancia:
        raise ErroConsistencia(
            f"Campo fora de D(A_ε): resíduos de contorno {residuos}.", "ContornoViolado"
        )
    return diferencial_casca(TipoDiferencial.ROT3, diferencial_casca(TipoDiferencial.ROT3, u))


# --- Termo não linear ---


@functools.lru_cache(maxsize=16)
def _malha_fina(geometria: GeometriaCasca) -> Tuple[np.ndarray, np.ndarray, GradeEsfera]:
    """Nós e pesos radiais refinados mais a grade esférica com quadratura exata para produtos cúbicos."""
    xi, pesos = roots_legendre(2 * geometria.nr + 4)
    return geometria.r_de_xi(xi), 0.5 * geometria.eps * pesos, obter_grade(geometria.grade.lmax)


def _avaliar_velocidade(
    base: BaseCasca, c_T: np.ndarray, c_P: np.ndarray, r: np.ndarray, grade: GradeEsfera, derivadas: bool
) -> Dict[str, np.ndarray]:
    """Componentes da velocidade (e, se pedido, suas derivadas) na malha fina."""
    L = autovalores_stokes(grade.lmax)
    pot = base.avaliar_potenciais(c_T, c_P, r)
    rr = r[:, None]
    a_r = L * pot["Q"] / rr**2
    chi = pot["dQ"] / rr
    psi = pot["S"] / rr

    campos = grade.derivadas_tangente(chi, psi) if derivadas else {}
    if not derivadas:
        campos["u_lambda"], campos["u_phi"] = grade.sintetizar_tangente(chi, psi)
    campos["u_r"] = grade.sintetizar_valores(a_r)
    campos["potenciais"] = pot
    if derivadas:
        campos["dl_u_r"] = grade.sintetizar_valores(a_r, 1, 0)
        campos["dp_u_r"] = grade.sintetizar_valores(a_r, 0, 1)
        campos["dr_u_r"] = grade.sintetizar_valores(L * (pot["dQ"] / rr**2 - 2.0 * pot["Q"] / rr**3))
        campos["dr_u_lambda"], campos["dr_u_phi"] = grade.sintetizar_tangente(
            pot["d2Q"] / rr - pot["dQ"] / rr**2, pot["dS"] / rr - pot["S"] / rr**2
        )
    return campos


def _advectivo(u: Dict[str, np.ndarray], v: Dict[str, np.ndarray], r: np.ndarray, grade: GradeEsfera):
    """(u·∇)v em coordenadas esféricas, com os termos de curvatura."""
    R = r[:, None, None]
    s = grade.sen_colatitude[:, None]
    cotangente = grade.cos_colatitude[:, None] / s

    def derivada_direcional(nome: str) -> np.ndarray:
        return (
            u["u_r"] * v[f"dr_{nome}"]
            + u["u_lambda"] * v[f"dl_{nome}"] / R
            + u["u_phi"] * v[f"dp_{nome}"] / (R * s)
        )

    w_r = derivada_direcional("u_r") - (u["u_lambda"] * v["u_lambda"] + u["u_phi"] * v["u_phi"]) / R
    w_lambda = derivada_direcional("u_lambda") + (
        u["u_lambda"] * v["u_r"] - u["u_phi"] * v["u_phi"] * cotangente
    ) / R
    w_phi = derivada_direcional("u_phi") + (u["u_phi"] * v["u_r"] + u["u_phi"] * v["u_lambda"] * cotangente) / R
    return w_r, w_lambda, w_phi


def _rotacional_vezes(u: Dict[str, np.ndarray], r: np.ndarray, grade: GradeEsfera):
    """(curl u) × u a partir dos potenciais: curl de S é poloidal S, curl de Q é toroidal −Q″ + l(l+1)Q/r²."""
    L = autovalores_stokes(grade.lmax)
    pot = u["potenciais"]
    rr = r[:, None]
    toroidal_rot = -pot["d2Q"] + L * pot["Q"] / rr**2
    w_r = grade.sintetizar_valores(L * pot["S"] / rr**2)
    w_lambda, w_phi = grade.sintetizar_tangente(pot["dS"] / rr, toroidal_rot / rr)
    return (
        w_lambda * u["u_phi"] - w_phi * u["u_lambda"],
        w_phi * u["u_r"] - w_r * u["u_phi"],
        w_r * u["u_lambda"] - w_lambda * u["u_r"],
    )


def termo_nao_linear_casca(
    base: BaseCasca,
    u: Coeficientes,
    v: Optional[Coeficientes] = None,
    forma: FormaNaoLinear = FormaNaoLinear.ROTACIONAL,
) -> Coeficientes:
    """
    Imagem de Galerkin de B_ε(u, v) = (u·∇)v na base, avaliada na malha fina.

    A forma advectiva aceita u ≠ v e satisfaz ⟨B_ε(u, v), v⟩ = 0 até o erro de
    quadratura; a rotacional só calcula B_ε(u, u) como (curl u) × u, cujo
    gradiente residual é anulado pela projeção.

    Raises:
        ErroUso: v informado com a forma rotacional.
    """
    forma = FormaNaoLinear(forma)
    if forma is FormaNaoLinear.ROTACIONAL and v is not None:
        raise ErroUso("A forma rotacional só calcula B_ε(u, u).", "FormaIncompativel")
    if not (np.any(u[0]) or np.any(u[1])):
        return base.zeros()
    r, pesos, grade = _malha_fina(base.geometria)

    if forma is FormaNaoLinear.ROTACIONAL:
        campo_u = _avaliar_velocidade(base, *u, r, grade, derivadas=False)
        w = _rotacional_vezes(campo_u, r, grade)
    else:
        campo_u = _avaliar_velocidade(base, *u, r, grade, derivadas=False)
        campo_v = _avaliar_velocidade(base, *(u if v is None else v), r, grade, derivadas=True)
        w = _advectivo(campo_u, campo_v, r, grade)
    return base.projetar_valores(r, pesos, grade, *w)


# --- Configuração e estado ---


@dataclass
class ConfiguracaoSolucionadorCasca:
    """
    Parâmetros de uma integração na casca.

    Attributes:
        geometria: Geometria fixa da execução.
        nu: Viscosidade ν > 0.
        dt: Passo de tempo.
        t_final: Horizonte T.
        forcamento: f̃_ε constante ou função de t (campos na geometria).
        ruido: Ruído elevado g̃_ε^j; None para o caso determinístico.
        esquema: Tratamento da parte implícita A_ε.
        modo: STOKES (padrão das varreduras) ou NSE.
        forma_nao_linear: Forma de B_ε usada no modo NSE.
        passos_por_amostra: Intervalo de amostragem.
    """

    geometria: GeometriaCasca
    nu: float
    dt: float
    t_final: float
    forcamento: ForcamentoCasca = None
    ruido: Optional[RuidoCasca] = None
    esquema: EsquemaTemporal = EsquemaTemporal.FATOR_INTEGRANTE
    modo: ModoDinamica = ModoDinamica.STOKES
    forma_nao_linear: FormaNaoLinear = FormaNaoLinear.ROTACIONAL
    passos_por_amostra: int = 1

    def __post_init__(self):
        self.esquema = EsquemaTemporal(self.esquema)
        self.modo = ModoDinamica(self.modo)
        self.forma_nao_linear = FormaNaoLinear(self.forma_nao_linear)
        if self.nu <= 0:
            raise ErroConfiguracao(f"Viscosidade deve ser positiva (recebida {self.nu}).")
        if self.dt <= 0:
            raise ErroConfiguracao(f"dt deve ser positivo (recebido {self.dt}).")
        if self.t_final < 0:
            raise ErroConfiguracao(f"t_final não pode ser negativo (recebido {self.t_final}).")
        if self.passos_por_amostra < 1:
            raise ErroConfiguracao("passos_por_amostra deve ser ≥ 1.")
        if self.modo is ModoDinamica.NSE and self.geometria.grade.lmax > LMAX_MAXIMO_NSE:
            raise ErroConfiguracao(f"Modo NSE limitado a lmax ≤ {LMAX_MAXIMO_NSE}.")
        if self.ruido is not None and self.ruido.geometria != self.geometria:
            raise ErroConsistencia("Ruído elevado para outra geometria.", "GeometriaDivergente")
        if isinstance(self.forcamento, CampoVetorialCasca) and self.forcamento.geometria != self.geometria:
            raise ErroConsistencia("Forçamento definido em outra geometria.", "GeometriaDivergente")

    @functools.cached_property
    def base(self) -> BaseCasca:
        return obter_base(self.geometria)

    @property
    def numero_passos(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def estocastico(self) -> bool:
        return self.ruido is not None and self.ruido.N > 0

    @functools.cached_property
    def fator_difusao(self) -> Coeficientes:
        lam_T, lam_P = self.base.autovalores
        if self.esquema is EsquemaTemporal.FATOR_INTEGRANTE:
            return np.exp(-self.nu * lam_T * self.dt), np.exp(-self.nu * lam_P * self.dt)
        return 1.0 / (1.0 + self.nu * lam_T * self.dt), 1.0 / (1.0 + self.nu * lam_P * self.dt)

    @functools.cached_property
    def ruido_projetado(self) -> Coeficientes:
        """Coeficientes de cada g̃^j, formas (N, ncoef, nT) e (N, ncoef, nP)."""
        c_T, c_P = self.base.zeros()
        if self.ruido is None or not self.ruido.campos:
            return np.zeros((0,) + c_T.shape), np.zeros((0,) + c_P.shape)
        projecoes = [self.base.projetar(campo) for campo in self.ruido.campos]
        return np.stack([p[0] for p in projecoes]), np.stack([p[1] for p in projecoes])

    @functools.cached_property
    def _forcamento_constante(self) -> Coeficientes:
        if self.forcamento is None:
            return self.base.zeros()
        return self.base.projetar(self.forcamento)

    def coeficientes_forcamento(self, t: float) -> Coeficientes:
        """Coeficientes de P_ε f̃(t)."""
        if not callable(self.forcamento):
            return self._forcamento_constante
        valor = self.forcamento(t)
        if valor is None:
            return self.base.zeros()
        if valor.geometria != self.geometria:
            raise ErroConsistencia("Forçamento definido em outra geometria.", "GeometriaDivergente")
        return self.base.projetar(valor)


@dataclass(frozen=True, eq=False)
class EstadoCasca:
    t: float
    c_T: np.ndarray
    c_P: np.ndarray
    livro: LivroEnergia = field(default_factory=LivroEnergia)
    passo: int = 0

    @property
    def coeficientes(self) -> Coeficientes:
        return self.c_T, self.c_P


def passo_casca(
    estado: EstadoCasca, config: ConfiguracaoSolucionadorCasca, dW: Optional[np.ndarray] = None
) -> EstadoCasca:
    """
    Um passo IMEX: A_ε implícito (diagonal na base), B_ε, força e ruído explícitos.

    Raises:
        ErroUso: dW incompatível com o ruído configurado.
        ErroDivergencia: Estado não finito após o passo.
    """
    dW = validar_incremento(config.ruido, dW)
    base = config.base
    dt = config.dt
    t = estado.t
    c_T, c_P = estado.c_T, estado.c_P
    F_T, F_P = config.coeficientes_forcamento(t)

    exp_T = c_T + dt * F_T
    exp_P = c_P + dt * F_P
    if config.modo is ModoDinamica.NSE:
        B_T, B_P = termo_nao_linear_casca(base, (c_T, c_P), forma=config.forma_nao_linear)
        exp_T = exp_T - dt * B_T
        exp_P = exp_P - dt * B_P

    martingal = 0.0
    variacao = 0.0
    if dW.size:
        fator = config.ruido.fator(t)
        G_T, G_P = config.ruido_projetado
        exp_T = exp_T + fator * np.einsum("j,jkn->kn", dW, G_T)
        exp_P = exp_P + fator * np.einsum("j,jkn->kn", dW, G_P)
        acoplamento = np.einsum("jkn,kn->j", G_T, c_T) + np.einsum("jkn,kn->j", G_P, c_P)
        martingal = 2.0 * fator * float(dW @ acoplamento)
        variacao = dt * fator**2 * float(np.sum(G_T**2) + np.sum(G_P**2))

    fator_T, fator_P = config.fator_difusao
    novo_T = fator_T * exp_T
    novo_P = fator_P * exp_P
    if not (np.all(np.isfinite(novo_T)) and np.all(np.isfinite(novo_P))):
        raise ErroDivergencia(
            f"Estado não finito na casca (ε={config.geometria.eps}) em t={t + dt:.6g}.", estado.passo + 1
        )

    lam_T, lam_P = base.autovalores
    vlinha = np.sum(np.divide(F_T**2, lam_T, out=np.zeros_like(F_T), where=lam_T > 0)) + np.sum(
        np.divide(F_P**2, lam_P, out=np.zeros_like(F_P), where=lam_P > 0)
    )
    livro = estado.livro.acumular(
        dissipacao=2.0 * config.nu * dt * base.energia_rotacional(c_T, c_P),
        trabalho_forcamento=2.0 * dt * float(np.sum(F_T * c_T) + np.sum(F_P * c_P)),
        forcamento_vlinha=dt * float(vlinha),
        variacao_quadratica=variacao,
        martingal=martingal,
    )
    return EstadoCasca(t + dt, novo_T, novo_P, livro, estado.passo + 1)


# --- Trajetória ---


@dataclass(frozen=True, eq=False)
class TrajetoriaCasca:
    """
    Coeficientes amostrados, traço α_ε por amostra e normas da decomposição.

    A decomposição completa de cada amostra é sintetizada sob demanda.
    """

    base: BaseCasca
    nu: float
    tempos: List[float]
    coeficientes: List[Coeficientes]
    livros: List[LivroEnergia]
    alphas: List[SolenoidalEspectral]
    energia_media: List[float]
    energia_flutuacao: List[float]
    rotacional_flutuacao: List[float]
    energia_inicial: float
    residuo_energia: float
    identidade_ok: bool

    @property
    def geometria(self) -> GeometriaCasca:
        return self.base.geometria

    def energias(self) -> np.ndarray:
        return np.array([self.base.energia(*c) for c in self.coeficientes])

    def campo(self, indice: int) -> CampoVetorialCasca:
        return self.base.sintetizar(*self.coeficientes[indice])

    def decomposicao(self, indice: int) -> DecomposicaoCasca:
        return decompor(self.campo(indice))

    def para_linhas(self) -> List[Dict[str, float]]:
        linhas = []
        for i, (t, livro, alpha) in enumerate(zip(self.tempos, self.livros, self.alphas)):
            c_T, c_P = self.coeficientes[i]
            linhas.append(
                {
                    "t": t,
                    "norma_l2": float(np.sqrt(self.base.energia(c_T, c_P))),
                    "norma_rot": float(np.sqrt(self.base.energia_rotacional(c_T, c_P))),
                    "dissipacao": livro.dissipacao,
                    "trabalho_forcamento": livro.trabalho_forcamento,
                    "variacao_quadratica": livro.variacao_quadratica,
                    "martingal": livro.martingal,
                    "norma_alpha": float(np.sqrt(np.sum(autovalores_stokes(alpha.grade.lmax) * alpha.psi**2))),
                    "norma_beta": float(np.sqrt(self.energia_flutuacao[i])),
                    "norma_rot_beta": float(np.sqrt(self.rotacional_flutuacao[i])),
                }
            )
        return linhas


def dados_iniciais_casca(base: BaseCasca, u0: SolenoidalEspectral, poluicao: float = 0.0) -> Coeficientes:
    """ũ₀ = R̊_ε u₀ + poluicao·ε·η, com η toroidal de perfil q(r) e média nula."""
    c_T = base.retrair_coeficientes(u0)
    if poluicao:
        c_T = c_T + poluicao * base.geometria.eps * base.coeficientes_poluicao(u0)
    _, c_P = base.zeros()
    return c_T, c_P


def _validar_caminho(config: ConfiguracaoSolucionadorCasca, caminho: Optional[CaminhoWiener]) -> None:
    if not config.estocastico:
        if caminho is not None and caminho.N > 0:
            raise ErroUso("Caminho de Wiener fornecido para execução determinística.", "IncrementoInesperado")
        return
    if caminho is None:
        raise ErroUso("Execução estocástica exige um caminho de Wiener.", "IncrementoAusente")
    if caminho.N != config.ruido.N or caminho.passos < config.numero_passos:
        raise ErroUso("Caminho de Wiener incompatível com a configuração.", "IncrementoInvalido")
    if not np.isclose(caminho.dt, config.dt, rtol=1e-12, atol=0.0):
        raise ErroUso(f"Caminho com dt={caminho.dt}; solucionador com dt={config.dt}.", "IncrementoInvalido")


def executar_casca(
    config: ConfiguracaoSolucionadorCasca,
    u0: Union[CampoVetorialCasca, Coeficientes],
    caminho: Optional[CaminhoWiener] = None,
) -> TrajetoriaCasca:
    """
    Integra na casca e registra, por amostra, α_ε = M̊_ε u e as normas de β̃_ε = Ñ_ε u.

    Args:
        config: Configuração validada.
        u0: Campo inicial (projetado na base) ou coeficientes (c_T, c_P).
        caminho: Caminho de Wiener compartilhado com a esfera, se estocástico.

    Raises:
        ErroConfiguracao: Dados iniciais em outra geometria ou com forma errada.
        ErroUso: Caminho ausente, inesperado ou incompatível.
        ErroDivergencia: Propagado do passo.
    """
    base = config.base
    _validar_caminho(config, caminho)
    if isinstance(u0, CampoVetorialCasca):
        c_T, c_P = base.projetar(u0)
    else:
        c_T, c_P = (np.array(c, dtype=float) for c in u0)
        zeros_T, zeros_P = base.zeros()
        if c_T.shape != zeros_T.shape or c_P.shape != zeros_P.shape:
            raise ErroConfiguracao("Coeficientes iniciais com forma incompatível com a base.")

    tempos: List[float] = []
    coeficientes: List[Coeficientes] = []
    livros: List[LivroEnergia] = []
    alphas: List[SolenoidalEspectral] = []
    energia_media: List[float] = []
    energia_flutuacao: List[float] = []
    rotacional_flutuacao: List[float] = []

    def registrar(estado: EstadoCasca) -> None:
        (media_T, media_P), (flut_T, flut_P) = base.partes(estado.c_T, estado.c_P)
        tempos.append(estado.t)
        coeficientes.append((estado.c_T, estado.c_P))
        livros.append(estado.livro)
        alphas.append(base.traco(estado.c_T))
        energia_media.append(base.energia(media_T, media_P))
        energia_flutuacao.append(base.energia(flut_T, flut_P))
        rotacional_flutuacao.append(base.energia_rotacional(flut_T, flut_P))

    estado = EstadoCasca(0.0, c_T, c_P)
    registrar(estado)
    total = config.numero_passos
    for k in range(total):
        dW = caminho.incremento(k) if config.estocastico else None
        estado = passo_casca(estado, config, dW)
        if estado.passo % config.passos_por_amostra == 0 or estado.passo == total:
            registrar(estado)

    energia_inicial = base.energia(c_T, c_P)
    residuo = base.energia(*estado.coeficientes) - estado.livro.balanco(energia_inicial)
    identidade_ok = True
    if not config.estocastico and config.forcamento is None:
        lam_max = max(float(np.max(a)) if a.size else 0.0 for a in base.autovalores)
        limite = 4.0 * (config.nu * lam_max) ** 2 * config.t_final * config.dt * energia_inicial + 1e-12
        identidade_ok = abs(residuo) <= limite
        if not identidade_ok:
            logger.warning(f"Casca ε={config.geometria.eps}: resíduo de energia {residuo:.3e} acima de {limite:.3e}")

    logger.debug(f"Casca ε={config.geometria.eps}: {total} passos concluídos")
    return TrajetoriaCasca(
        base=base,
        nu=config.nu,
        tempos=tempos,
        coeficientes=coeficientes,
        livros=livros,
        alphas=alphas,
        energia_media=energia_media,
        energia_flutuacao=energia_flutuacao,
        rotacional_flutuacao=rotacional_flutuacao,
        energia_inicial=energia_inicial,
        residuo_energia=float(residuo),
        identidade_ok=identidade_ok,
    )


def residuo_identidade_modificada(
    trajetoria: TrajetoriaCasca,
    config: ConfiguracaoSolucionadorCasca,
    phi: SolenoidalEspectral,
    caminho: Optional[CaminhoWiener] = None,
) -> float:
    """
    Maior resíduo, ao longo da trajetória, da identidade fraca para α_ε testada com φ:

        (α(t), φ) = (α(0), φ) − ν∫(curl α̃, curl R̊φ)/ε − ν∫(curl β̃, curl R̊φ)/ε
                    + ∫(M̊_ε f̃, φ) + Σ_j (M̊_ε g̃^j, φ) Δβ_j

    com a mesma regra do ponto à esquerda do solucionador (modo Stokes). O
    resíduo é O(dt).

    Raises:
        ErroUso: Trajetória sem todos os passos ou em modo NSE.
    """
    if config.modo is not ModoDinamica.STOKES:
        raise ErroUso("Identidade modificada conferida apenas no modo Stokes.")
    if config.passos_por_amostra != 1:
        raise ErroUso("A identidade modificada exige a trajetória com todos os passos.")
    base = trajetoria.base
    eps = base.geometria.eps
    teste_T = base.retrair_coeficientes(phi)
    lam_T, lam_P = base.autovalores
    G_T, _ = config.ruido_projetado

    def pareamento(c_T: np.ndarray) -> float:
        # (α, φ)_{S²} = (u, R̊φ)_{L²(Q_ε)} / ε
        return float(np.sum(c_T * teste_T)) / eps

    inicial = pareamento(trajetoria.coeficientes[0][0])
    acumulado = inicial
    maior = 0.0
    escala = max(abs(inicial), float(np.sqrt(np.sum(teste_T**2))), 1e-300)
    for k in range(len(trajetoria.tempos) - 1):
        c_T, c_P = trajetoria.coeficientes[k]
        (media_T, _), (flut_T, _) = base.partes(c_T, c_P)
        t = trajetoria.tempos[k]
        F_T, _ = config.coeficientes_forcamento(t)
        acumulado -= config.nu * config.dt * float(np.sum(lam_T * media_T * teste_T)) / eps
        acumulado -= config.nu * config.dt * float(np.sum(lam_T * flut_T * teste_T)) / eps
        acumulado += config.dt * pareamento(F_T)
        if config.estocastico:
            fator = config.ruido.fator(t)
            ruido_T = fator * np.einsum("j,jkn->kn", caminho.incremento(k), G_T)
            acumulado += pareamento(ruido_T)
        atual = pareamento(trajetoria.coeficientes[k + 1][0])
        maior = max(maior, abs(atual - acumulado) / escala)
    return maior
