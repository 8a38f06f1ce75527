# app/ferramentas/operadores_casca.py
"""
Geometria da casca fina Q_ε = {1 ≤ |y| ≤ 1 + ε}, operadores de média e retração
e operadores diferenciais em coordenadas esféricas.

A direção radial usa nós de Gauss–Legendre em [1, 1 + ε] e a matriz de
diferenciação do interpolante polinomial nesses nós; as direções tangenciais
usam as transformadas de `operadores_esfera`.

Campos de divergência nula são construídos por potenciais toroidal (S) e
poloidal (Q):

    u_r   = l(l+1) Q / r²
    u_tan = grad′(∂r Q / r) + curl′(S / r)

o que dá div u = 0 exatamente para perfis polinomiais.
"""

import functools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import legendre as leg
from scipy.special import roots_legendre

from app.core.excecoes import ErroConfiguracao, ErroUso
from app.ferramentas.operadores_esfera import (
    CampoEscalarEsfera,
    CampoTangenteEsfera,
    EscalarEspectral,
    GradeEsfera,
    SolenoidalEspectral,
    autovalores_stokes,
    graus_e_ordens,
    produto_interno,
)

logger = logging.getLogger(__name__)

EPS_MAXIMO = 0.5


@dataclass(frozen=True)
class GeometriaCasca:
    """
    Espessura, quadratura radial e grade esférica da casca.

    Attributes:
        eps: Espessura ε, com 0 < ε < 1/2.
        nr: Número de nós radiais de Gauss–Legendre.
        grade: Grade esférica embutida.
    """

    eps: float
    nr: int
    grade: GradeEsfera

    def __post_init__(self):
        if not (0.0 < self.eps < EPS_MAXIMO):
            raise ErroConfiguracao(f"Espessura ε={self.eps} fora de (0, 1/2).")
        if self.nr < 1:
            raise ErroConfiguracao(f"nr deve ser positivo (recebido {self.nr}).")

    @functools.cached_property
    def _referencia(self) -> Tuple[np.ndarray, np.ndarray]:
        xi, pesos = roots_legendre(self.nr)
        return np.asarray(xi), np.asarray(pesos)

    @functools.cached_property
    def nos_radiais(self) -> np.ndarray:
        return self.r_de_xi(self._referencia[0])

    @functools.cached_property
    def pesos_dr(self) -> np.ndarray:
        """Pesos para ∫₁^{1+ε} · dr."""
        return 0.5 * self.eps * self._referencia[1]

    @functools.cached_property
    def pesos_r1(self) -> np.ndarray:
        """Pesos para ∫ r · dr."""
        return self.pesos_dr * self.nos_radiais

    @functools.cached_property
    def pesos_r2(self) -> np.ndarray:
        """Pesos para ∫ r² · dr."""
        return self.pesos_dr * self.nos_radiais**2

    @property
    def forma(self) -> Tuple[int, int, int]:
        return (self.nr,) + self.grade.forma

    def r_de_xi(self, xi: np.ndarray) -> np.ndarray:
        return 1.0 + 0.5 * self.eps * (1.0 + np.asarray(xi))

    def xi_de_r(self, r: np.ndarray) -> np.ndarray:
        return 2.0 * (np.asarray(r) - 1.0) / self.eps - 1.0

    @functools.cached_property
    def _vandermonde(self) -> np.ndarray:
        return leg.legvander(self._referencia[0], self.nr - 1)

    def interpolacao(self, r_alvo: np.ndarray) -> np.ndarray:
        """Matriz (len(r_alvo), nr) que avalia o interpolante nodal em r_alvo."""
        alvo = leg.legvander(self.xi_de_r(np.atleast_1d(r_alvo)), self.nr - 1)
        return np.linalg.solve(self._vandermonde.T, alvo.T).T

    @functools.cached_property
    def matriz_diferenciacao(self) -> np.ndarray:
        """D com (D f)_k = f′(r_k) para f polinomial de grau ≤ nr − 1."""
        n = self.nr
        derivadas = np.zeros((n, n))
        for j in range(n):
            unitario = np.zeros(n)
            unitario[j] = 1.0
            derivadas[:, j] = leg.legval(self._referencia[0], leg.legder(unitario)) if n > 1 else 0.0
        matriz = np.linalg.solve(self._vandermonde.T, derivadas.T).T * (2.0 / self.eps)
        matriz.setflags(write=False)
        return matriz

    @functools.cached_property
    def linhas_contorno(self) -> np.ndarray:
        """Linhas (2, nr) que avaliam o interpolante em r = 1 e r = 1 + ε."""
        linhas = self.interpolacao(np.array([1.0, 1.0 + self.eps]))
        linhas.setflags(write=False)
        return linhas

    def derivar_r(self, valores: np.ndarray) -> np.ndarray:
        """Derivada radial nodal ao longo do primeiro eixo."""
        return np.einsum("kj,j...->k...", self.matriz_diferenciacao, valores)

    def integrar(self, valores: np.ndarray, potencia_r: int = 2) -> float:
        """∫ f r^potencia dr dσ por quadratura no produto tensorial."""
        pesos_r = self.pesos_dr * self.nos_radiais**potencia_r
        return float(np.einsum("k,kij,ij->", pesos_r, valores, self.grade.pesos))

    def _r(self) -> np.ndarray:
        return self.nos_radiais[:, None, None]


def perfil_flutuacao(geometria: GeometriaCasca, r: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Perfil radial q(ξ) = ξ⁴ − 2ξ² + 7/15 usado para poluir dados e ruído.

    Tem média nula em [1, 1 + ε] e derivada nula nas paredes, então o campo
    toroidal com potencial q·g tem média radial ponderada nula e satisfaz as
    condições livres de contorno.
    """
    xi = geometria.xi_de_r(geometria.nos_radiais if r is None else r)
    return xi**4 - 2.0 * xi**2 + 7.0 / 15.0


# --- Campos ---


def _congelar(instancia, nome: str, valor, forma: Tuple[int, ...]) -> None:
    array = np.array(valor, dtype=float)
    if array.shape != forma:
        raise ErroConfiguracao(f"'{nome}' com forma {array.shape}; esperado {forma}.")
    array.setflags(write=False)
    object.__setattr__(instancia, nome, array)


@dataclass(frozen=True, eq=False)
class CampoEscalarCasca:
    geometria: GeometriaCasca
    valores: np.ndarray

    def __post_init__(self):
        _congelar(self, "valores", self.valores, self.geometria.forma)

    def __add__(self, outro: "CampoEscalarCasca") -> "CampoEscalarCasca":
        verificar_geometria(self, outro)
        return CampoEscalarCasca(self.geometria, self.valores + outro.valores)

    def __sub__(self, outro: "CampoEscalarCasca") -> "CampoEscalarCasca":
        verificar_geometria(self, outro)
        return CampoEscalarCasca(self.geometria, self.valores - outro.valores)


@dataclass(frozen=True, eq=False)
class CampoVetorialCasca:
    """Campo (u_r, u_λ, u_φ) nos nós radiais × grade esférica."""

    geometria: GeometriaCasca
    u_r: np.ndarray
    u_lambda: np.ndarray
    u_phi: np.ndarray

    def __post_init__(self):
        for nome in ("u_r", "u_lambda", "u_phi"):
            _congelar(self, nome, getattr(self, nome), self.geometria.forma)

    @classmethod
    def zero(cls, geometria: GeometriaCasca) -> "CampoVetorialCasca":
        zeros = np.zeros(geometria.forma)
        return cls(geometria, zeros, zeros, zeros)

    @property
    def componentes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.u_r, self.u_lambda, self.u_phi

    def __add__(self, outro: "CampoVetorialCasca") -> "CampoVetorialCasca":
        verificar_geometria(self, outro)
        return CampoVetorialCasca(self.geometria, *(a + b for a, b in zip(self.componentes, outro.componentes)))

    def __sub__(self, outro: "CampoVetorialCasca") -> "CampoVetorialCasca":
        verificar_geometria(self, outro)
        return CampoVetorialCasca(self.geometria, *(a - b for a, b in zip(self.componentes, outro.componentes)))

    def __mul__(self, escalar: float) -> "CampoVetorialCasca":
        return CampoVetorialCasca(self.geometria, *(escalar * a for a in self.componentes))

    __rmul__ = __mul__


CampoCasca = Union[CampoEscalarCasca, CampoVetorialCasca]


def verificar_geometria(*campos, geometria: Optional[GeometriaCasca] = None) -> GeometriaCasca:
    """
    Garante que todos os campos compartilham a mesma geometria.

    Args:
        campos: Campos na casca.
        geometria: Referência explícita; na ausência, vale a do primeiro campo.

    Raises:
        ErroConfiguracao: Alguma geometria diverge da referência.
    """
    referencia = geometria if geometria is not None else campos[0].geometria
    for campo in campos:
        if campo.geometria != referencia:
            raise ErroConfiguracao(
                f"Geometrias incompatíveis: ε={referencia.eps} e ε={campo.geometria.eps}.", "GeometriaDivergente"
            )
    return referencia


@dataclass(frozen=True, eq=False)
class DecomposicaoCasca:
    """u = media + flutuacao, com traco = M̊_ε u na esfera."""

    media: CampoVetorialCasca
    flutuacao: CampoVetorialCasca
    traco: CampoTangenteEsfera


# --- Construção por potenciais ---


def campo_de_potenciais(
    geometria: GeometriaCasca, toroidal: np.ndarray, poloidal: Optional[np.ndarray] = None
) -> CampoVetorialCasca:
    """
    Sintetiza o campo de divergência nula dos potenciais nodais S e Q.

    Args:
        geometria: Geometria da casca.
        toroidal: S nos nós radiais, forma (nr, (lmax+1)²).
        poloidal: Q nos nós radiais, mesma forma (opcional).
    """
    grade = geometria.grade
    r = geometria.nos_radiais[:, None]
    autovalores = autovalores_stokes(grade.lmax)
    toroidal = np.asarray(toroidal, dtype=float)
    poloidal = np.zeros_like(toroidal) if poloidal is None else np.asarray(poloidal, dtype=float)

    u_r = grade.sintetizar_valores(autovalores * poloidal / r**2)
    u_lambda, u_phi = grade.sintetizar_tangente(geometria.derivar_r(poloidal) / r, toroidal / r)
    return CampoVetorialCasca(geometria, u_r, u_lambda, u_phi)


def campo_solenoidal_aleatorio(
    geometria: GeometriaCasca,
    rng: np.random.Generator,
    decaimento: float = 1.0,
    peso_poloidal: float = 1.0,
) -> CampoVetorialCasca:
    """
    Campo aleatório em V_ε: divergência nula e u·n = 0 nas paredes.

    O potencial poloidal é mascarado por (r − 1)(1 + ε − r), o que anula u_r
    nas duas paredes sem sair do espaço polinomial de grau nr − 1.
    """
    grade = geometria.grade
    graus, _ = graus_e_ordens(grade.lmax)
    amplitude = np.where(graus >= 1, (1.0 + graus) ** (-decaimento), 0.0)
    nr = geometria.nr
    r = geometria.nos_radiais[:, None]
    ncoef = grade.numero_coeficientes

    toroidal = amplitude * rng.standard_normal((nr, ncoef))
    poloidal = np.zeros_like(toroidal)
    if nr >= 3 and peso_poloidal:
        mascara = (r - 1.0) * (1.0 + geometria.eps - r) / geometria.eps**2
        # grau nr − 3 antes da máscara
        base = leg.legvander(geometria.xi_de_r(geometria.nos_radiais), nr - 3)
        interior = base @ (amplitude * rng.standard_normal((nr - 2, ncoef)))
        poloidal = peso_poloidal * geometria.eps * mascara * interior
    return campo_de_potenciais(geometria, toroidal, poloidal)


# --- Médias ---


class TipoMedia(str, Enum):
    M_ESCALAR = "M_SCALAR"
    M_CHAPEU = "MHAT"
    N_CHAPEU = "NHAT"
    M_TIL = "MTILDE"
    N_TIL = "NTILDE"
    M_ANEL = "MRING"


def _media_radial(geometria: GeometriaCasca, valores: np.ndarray) -> np.ndarray:
    """(1/ε) ∫ r ψ(r x) dr para cada ponto da esfera."""
    return np.einsum("k,kij->ij", geometria.pesos_r1, valores) / geometria.eps


def _estender(geometria: GeometriaCasca, valores_esfera: np.ndarray) -> np.ndarray:
    """R_ε: ψ(x) -> ψ(x)/r em todos os nós radiais."""
    return valores_esfera[None, :, :] / geometria._r()


def media(tipo: TipoMedia, campo: CampoCasca, geometria: Optional[GeometriaCasca] = None):
    """
    Operadores de média radial.

    Args:
        tipo: M_ESCALAR e M_CHAPEU/N_CHAPEU recebem escalares; M_TIL, N_TIL e
            M_ANEL recebem campos vetoriais.
        campo: Campo na casca.
        geometria: Se informada, precisa coincidir com a do campo.

    Returns:
        CampoEscalarEsfera (M_ESCALAR), CampoTangenteEsfera (M_ANEL) ou campo na casca.

    Raises:
        ErroConfiguracao: Geometria divergente da do campo.
        ErroUso: Tipo de campo incompatível com o operador.
    """
    tipo = TipoMedia(tipo)
    geo = verificar_geometria(campo, geometria=geometria)
    escalares = (TipoMedia.M_ESCALAR, TipoMedia.M_CHAPEU, TipoMedia.N_CHAPEU)

    if tipo in escalares:
        if not isinstance(campo, CampoEscalarCasca):
            raise ErroUso(f"{tipo.value} exige CampoEscalarCasca.", "TipoEntradaInvalido")
        medio = _media_radial(geo, campo.valores)
        if tipo is TipoMedia.M_ESCALAR:
            return CampoEscalarEsfera(geo.grade, medio)
        chapeu = _estender(geo, medio)
        if tipo is TipoMedia.M_CHAPEU:
            return CampoEscalarCasca(geo, chapeu)
        return CampoEscalarCasca(geo, campo.valores - chapeu)

    if not isinstance(campo, CampoVetorialCasca):
        raise ErroUso(f"{tipo.value} exige CampoVetorialCasca.", "TipoEntradaInvalido")
    medio_lambda = _media_radial(geo, campo.u_lambda)
    medio_phi = _media_radial(geo, campo.u_phi)
    if tipo is TipoMedia.M_ANEL:
        return CampoTangenteEsfera(geo.grade, medio_lambda, medio_phi)
    media_til = CampoVetorialCasca(
        geo, np.zeros(geo.forma), _estender(geo, medio_lambda), _estender(geo, medio_phi)
    )
    if tipo is TipoMedia.M_TIL:
        return media_til
    return campo - media_til


# --- Retrações ---


class TipoRetracao(str, Enum):
    R_ESCALAR = "R_SCALAR"
    R_ANEL = "R_RING"


def retrair(tipo: TipoRetracao, campo_esfera, geometria: GeometriaCasca):
    """
    Estende um campo da esfera à casca com perfil 1/r.

    Examples:
        >>> # ‖R̊_ε u‖²_{L²(Q_ε)} = ε ‖u‖²_{L²(S²)}
        >>> grade = GradeEsfera.criar(4)
        >>> geo = GeometriaCasca(0.25, 6, grade)
        >>> u = SolenoidalEspectral.modo(grade, 1, 0, 1 / np.sqrt(2))
        >>> round(produto_interno_casca(retrair("R_RING", u, geo), retrair("R_RING", u, geo)), 10)
        0.25
    """
    tipo = TipoRetracao(tipo)
    if isinstance(campo_esfera, SolenoidalEspectral):
        campo_esfera = campo_esfera.sintetizar()
    if isinstance(campo_esfera, EscalarEspectral):
        campo_esfera = CampoEscalarEsfera(campo_esfera.grade, campo_esfera.grade.sintetizar_valores(campo_esfera.coeficientes))
    if getattr(campo_esfera, "grade", None) != geometria.grade:
        raise ErroConfiguracao("Campo da esfera não está na grade embutida da geometria.")

    if tipo is TipoRetracao.R_ESCALAR:
        if not isinstance(campo_esfera, CampoEscalarEsfera):
            raise ErroUso("R_ESCALAR exige um escalar na esfera.", "TipoEntradaInvalido")
        return CampoEscalarCasca(geometria, _estender(geometria, campo_esfera.valores))

    if not isinstance(campo_esfera, CampoTangenteEsfera):
        raise ErroUso("R_ANEL exige um campo tangente (sem componente radial).", "ComponenteRadial")
    return CampoVetorialCasca(
        geometria,
        np.zeros(geometria.forma),
        _estender(geometria, campo_esfera.u_lambda),
        _estender(geometria, campo_esfera.u_phi),
    )


# --- Operadores diferenciais ---


class TipoDiferencial(str, Enum):
    ROT3 = "CURL3"
    DIV3 = "DIV3"
    LAPLACIANO3 = "LAPLACIAN3"
    GRAD3 = "GRAD3"


def _analisar_niveis(geometria: GeometriaCasca, valores: np.ndarray) -> np.ndarray:
    return geometria.grade.analisar_valores(valores)


def _rotacional(u: CampoVetorialCasca) -> CampoVetorialCasca:
    geo = u.geometria
    grade = geo.grade
    r = geo._r()
    _, psi = grade.analisar_tangente(u.u_lambda, u.u_phi)
    radial = grade.sintetizar_valores(autovalores_stokes(grade.lmax) * psi) / r

    coef_r = _analisar_niveis(geo, u.u_r)
    curl_lambda, curl_phi = grade.sintetizar_tangente(np.zeros_like(coef_r), coef_r)
    d_lambda = geo.derivar_r(r * u.u_lambda)
    d_phi = geo.derivar_r(r * u.u_phi)
    return CampoVetorialCasca(geo, radial, (curl_lambda - d_phi) / r, (curl_phi + d_lambda) / r)


def _divergencia(u: CampoVetorialCasca) -> CampoEscalarCasca:
    geo = u.geometria
    grade = geo.grade
    r = geo._r()
    chi, _ = grade.analisar_tangente(u.u_lambda, u.u_phi)
    tangencial = grade.sintetizar_valores(-autovalores_stokes(grade.lmax) * chi) / r
    return CampoEscalarCasca(geo, geo.derivar_r(r**2 * u.u_r) / r**2 + tangencial)


def _gradiente(psi: CampoEscalarCasca) -> CampoVetorialCasca:
    geo = psi.geometria
    coef = _analisar_niveis(geo, psi.valores)
    g_lambda, g_phi = geo.grade.sintetizar_tangente(coef, np.zeros_like(coef))
    r = geo._r()
    return CampoVetorialCasca(geo, geo.derivar_r(psi.valores), g_lambda / r, g_phi / r)


def _laplaciano(campo: CampoCasca) -> CampoCasca:
    geo = campo.geometria
    if isinstance(campo, CampoEscalarCasca):
        r = geo._r()
        coef = _analisar_niveis(geo, campo.valores)
        beltrami = geo.grade.sintetizar_valores(-autovalores_stokes(geo.grade.lmax) * coef)
        radial = geo.derivar_r(r**2 * geo.derivar_r(campo.valores)) / r**2
        return CampoEscalarCasca(geo, radial + beltrami / r**2)
    # Δu = ∇(div u) − curl curl u
    return _gradiente(_divergencia(campo)) - _rotacional(_rotacional(campo))


def diferencial_casca(tipo: TipoDiferencial, campo: CampoCasca) -> CampoCasca:
    """
    Operadores diferenciais em Q_ε: radial pela matriz de Gauss–Legendre,
    tangencial espectral.

    Raises:
        ErroConfiguracao: Menos de 3 nós radiais.
        ErroUso: Tipo de campo incompatível com o operador.
    """
    tipo = TipoDiferencial(tipo)
    if campo.geometria.nr < 3:
        raise ErroConfiguracao(f"Diferenciação radial exige nr ≥ 3 (recebido {campo.geometria.nr}).")
    if tipo is TipoDiferencial.LAPLACIANO3:
        return _laplaciano(campo)
    if tipo is TipoDiferencial.GRAD3:
        if not isinstance(campo, CampoEscalarCasca):
            raise ErroUso("GRAD3 exige CampoEscalarCasca.", "TipoEntradaInvalido")
        return _gradiente(campo)
    if not isinstance(campo, CampoVetorialCasca):
        raise ErroUso(f"{tipo.value} exige CampoVetorialCasca.", "TipoEntradaInvalido")
    return _rotacional(campo) if tipo is TipoDiferencial.ROT3 else _divergencia(campo)


# --- Produtos internos e normas ---


class TipoProdutoCasca(str, Enum):
    L2_QEPS = "L2_QEPS"
    PONDERADO_R = "WEIGHTED_R"
    SEMINORMA_V_EPS = "V_EPS_SEMINORM"


def _pontual(u: CampoCasca, v: CampoCasca) -> np.ndarray:
    if isinstance(u, CampoEscalarCasca) and isinstance(v, CampoEscalarCasca):
        return u.valores * v.valores
    if isinstance(u, CampoVetorialCasca) and isinstance(v, CampoVetorialCasca):
        return sum(a * b for a, b in zip(u.componentes, v.componentes))
    raise ErroUso("Produto interno entre escalar e vetor.", "TipoEntradaInvalido")


def produto_interno_casca(u: CampoCasca, v: CampoCasca, tipo: TipoProdutoCasca = TipoProdutoCasca.L2_QEPS) -> float:
    """
    Produtos internos em Q_ε.

    L2_QEPS integra com peso r² (medida de volume); PONDERADO_R acrescenta o
    fator r² da forma ponderada (u, v)_r = ∫ r² u·v dy; SEMINORMA_V_EPS é o
    produto L² dos rotacionais.
    """
    tipo = TipoProdutoCasca(tipo)
    geo = verificar_geometria(u, v)
    if tipo is TipoProdutoCasca.SEMINORMA_V_EPS:
        u = diferencial_casca(TipoDiferencial.ROT3, u)
        v = diferencial_casca(TipoDiferencial.ROT3, v)
    potencia = 4 if tipo is TipoProdutoCasca.PONDERADO_R else 2
    return geo.integrar(_pontual(u, v), potencia)


def norma_casca(u: CampoCasca, tipo: TipoProdutoCasca = TipoProdutoCasca.L2_QEPS) -> float:
    return float(np.sqrt(max(produto_interno_casca(u, u, tipo), 0.0)))


def norma_lp(campo: CampoCasca, p: float) -> float:
    """‖u‖_{L^p(Q_ε)} com potências pontuais do módulo na mesma quadratura."""
    if p < 1:
        raise ErroUso(f"Expoente p={p} inválido para norma L^p.")
    modulo = np.sqrt(_pontual(campo, campo))
    return float(campo.geometria.integrar(modulo**p) ** (1.0 / p))


# --- Decomposição e verificações ---


def decompor(u: CampoVetorialCasca) -> DecomposicaoCasca:
    """Separa u em média M̃_ε u, flutuação Ñ_ε u e traço M̊_ε u."""
    media_til = media(TipoMedia.M_TIL, u)
    return DecomposicaoCasca(
        media=media_til,
        flutuacao=u - media_til,
        traco=media(TipoMedia.M_ANEL, u),
    )


def verificar_dualidade(psi: CampoEscalarCasca, phi: Union[CampoEscalarEsfera, EscalarEspectral]) -> float:
    """
    Resíduo |(M_ε ψ, φ)_{L²(S²)} − (ψ, R_ε φ / ε)_{L²(Q_ε)}| da dualidade M_ε* = R_ε/ε.
    """
    geo = psi.geometria
    if isinstance(phi, EscalarEspectral):
        phi = CampoEscalarEsfera(phi.grade, phi.grade.sintetizar_valores(phi.coeficientes))
    media_psi = media(TipoMedia.M_ESCALAR, psi)
    lado_esfera = produto_interno(media_psi, phi)
    lado_casca = produto_interno_casca(psi, retrair(TipoRetracao.R_ESCALAR, phi, geo)) / geo.eps
    return abs(lado_esfera - lado_casca)


def verificar_dualidade_anel(u: CampoVetorialCasca, v: CampoTangenteEsfera) -> float:
    """Resíduo da dualidade M̊_ε* = R̊_ε/ε para campos tangentes."""
    geo = u.geometria
    lado_esfera = produto_interno(media(TipoMedia.M_ANEL, u), v)
    lado_casca = produto_interno_casca(u, retrair(TipoRetracao.R_ANEL, v, geo)) / geo.eps
    return abs(lado_esfera - lado_casca)


def residuos_h_eps(u: CampoVetorialCasca) -> Dict[str, float]:
    """
    Resíduos relativos de pertinência a H_ε.

    Returns:
        {'divergencia': ‖div u‖/‖u‖, 'parede': max |u·n| nas paredes / max |u|}.
        O traço normal é avaliado em r²u_r, que é polinomial para campos
        gerados por potenciais.
    """
    geo = u.geometria
    escala_l2 = norma_casca(u)
    escala_max = max(float(np.max(np.abs(np.stack(u.componentes)))), 1e-300)
    if escala_l2 == 0.0:
        return {"divergencia": 0.0, "parede": 0.0}
    divergencia = norma_casca(diferencial_casca(TipoDiferencial.DIV3, u)) / escala_l2
    r = geo._r()
    parede = np.einsum("pk,kij->pij", geo.linhas_contorno, r**2 * u.u_r)
    parede = parede / np.array([1.0, (1.0 + geo.eps) ** 2])[:, None, None]
    return {"divergencia": float(divergencia), "parede": float(np.max(np.abs(parede)) / escala_max)}


def verificar_h_eps(u: CampoVetorialCasca, tolerancia: float = 1e-8) -> bool:
    """Indicador de pertinência a H_ε (divergência e impermeabilidade)."""
    residuos = residuos_h_eps(u)
    return all(valor <= tolerancia for valor in residuos.values())
