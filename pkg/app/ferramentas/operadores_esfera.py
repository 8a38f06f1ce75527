# app/ferramentas/operadores_esfera.py
"""
Transformadas de harmônicos esféricos e operadores tangenciais na esfera unitária.

A grade é Gauss–Legendre na colatitude λ (x = cos λ) por pontos equiespaçados em
longitude φ. A base é a de harmônicos esféricos reais ortonormais, com vetor de
coeficientes plano no índice k = l² + l + m:

    m > 0 -> P̄_l^m(cos λ) cos(mφ)
    m < 0 -> P̄_l^|m|(cos λ) sen(|m|φ)

Campos tangentes são tratados pelos potenciais de Hodge u = grad′χ + curl′ψ, com
as convenções

    grad′χ = (∂λχ, ∂φχ / sen λ)
    curl′ψ = (∂φψ / sen λ, −∂λψ)
    curl′v = (∂λ(v_φ sen λ) − ∂φv_λ) / sen λ

de modo que curl′curl′ψ = −Δ′ψ e curl′ (campo -> escalar) é o adjunto de
curl′ (escalar -> campo) em L²(S²).
"""

import functools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln, lpmv, roots_legendre

from app.core.excecoes import ErroConfiguracao, ErroUso

# Configura o logger para este módulo
logger = logging.getLogger(__name__)

QUATRO_PI = 4.0 * np.pi


def numero_coeficientes(lmax: int) -> int:
    """Quantidade de coeficientes da truncagem triangular: (lmax + 1)²."""
    return (lmax + 1) ** 2


def indice_modo(l: int, m: int) -> int:
    """
    Posição do modo (l, m) no vetor plano de coeficientes.

    Examples:
        >>> indice_modo(0, 0), indice_modo(1, -1), indice_modo(2, 2)
        (0, 1, 8)
    """
    if l < 0 or abs(m) > l:
        raise ErroUso(f"Modo inválido (l={l}, m={m}).")
    return l * l + l + m


@functools.lru_cache(maxsize=None)
def graus_e_ordens(lmax: int) -> Tuple[np.ndarray, np.ndarray]:
    """Vetores (l, m) de cada coeficiente, na ordem do vetor plano."""
    graus = np.repeat(np.arange(lmax + 1), 2 * np.arange(lmax + 1) + 1)
    ordens = np.concatenate([np.arange(-l, l + 1) for l in range(lmax + 1)])
    graus.setflags(write=False)
    ordens.setflags(write=False)
    return graus, ordens


@functools.lru_cache(maxsize=None)
def autovalores_stokes(lmax: int) -> np.ndarray:
    """l(l+1) para cada coeficiente (zero no modo l = 0)."""
    graus, _ = graus_e_ordens(lmax)
    autovalores = (graus * (graus + 1)).astype(float)
    autovalores.setflags(write=False)
    return autovalores


@functools.lru_cache(maxsize=None)
def _mapa_indices(lmax: int):
    """Índices que levam o vetor plano às matrizes [m, l] de cossenos e senos."""
    ordens, graus = np.meshgrid(np.arange(lmax + 1), np.arange(lmax + 1), indexing="ij")
    valido = graus >= ordens
    valido_seno = valido & (ordens > 0)
    indice_cos = np.where(valido, graus * graus + graus + ordens, 0)
    indice_sen = np.where(valido_seno, graus * graus + graus - ordens, 0)
    return indice_cos, indice_sen, valido, valido_seno


def _inverso_autovalores(lmax: int) -> np.ndarray:
    autovalores = autovalores_stokes(lmax)
    inverso = np.zeros_like(autovalores)
    inverso[1:] = 1.0 / autovalores[1:]
    return inverso


def tamanho_grade_padrao(lmax: int) -> Tuple[int, int]:
    """
    Grade com folga para produtos quadráticos (regra dos 3/2).

    Returns:
        (nlat, nlon) com nlat = max(lmax + 1, ⌈(3·lmax + 1)/2⌉) e nlon = 2·nlat.
    """
    nlat = max(lmax + 1, int(np.ceil((3 * lmax + 1) / 2)))
    return nlat, 2 * nlat


@dataclass(frozen=True)
class GradeEsfera:
    """
    Grade Gauss–Legendre × longitudes equiespaçadas e o plano de transformadas.

    As tabelas de Legendre são calculadas uma única vez por instância e só
    são lidas depois disso, então a mesma grade pode ser compartilhada entre
    threads.

    Attributes:
        lmax: Grau máximo da truncagem triangular.
        nlat: Número de nós de Gauss em colatitude.
        nlon: Número de longitudes.
    """

    lmax: int
    nlat: int
    nlon: int

    def __post_init__(self):
        if self.lmax < 0:
            raise ErroConfiguracao(f"lmax deve ser não negativo (recebido {self.lmax}).")
        if self.nlat < self.lmax + 1:
            raise ErroConfiguracao(
                f"nlat={self.nlat} insuficiente para lmax={self.lmax} (mínimo {self.lmax + 1})."
            )
        if self.nlon < 2 * self.lmax + 1:
            raise ErroConfiguracao(
                f"nlon={self.nlon} insuficiente para lmax={self.lmax} (mínimo {2 * self.lmax + 1})."
            )

    @classmethod
    def criar(cls, lmax: int, nlat: Optional[int] = None, nlon: Optional[int] = None) -> "GradeEsfera":
        """Cria a grade, completando nlat/nlon com o tamanho padrão com folga."""
        nlat_padrao, nlon_padrao = tamanho_grade_padrao(lmax)
        nlat = nlat or nlat_padrao
        nlon = nlon or max(nlon_padrao, 2 * lmax + 1)
        return cls(lmax=lmax, nlat=nlat, nlon=nlon)

    # --- Geometria e quadratura ---

    @functools.cached_property
    def _nos_gauss(self) -> Tuple[np.ndarray, np.ndarray]:
        nos, pesos = roots_legendre(self.nlat)
        return np.asarray(nos), np.asarray(pesos)

    @functools.cached_property
    def cos_colatitude(self) -> np.ndarray:
        return self._nos_gauss[0]

    @functools.cached_property
    def colatitude(self) -> np.ndarray:
        return np.arccos(self.cos_colatitude)

    @functools.cached_property
    def sen_colatitude(self) -> np.ndarray:
        return np.sqrt(1.0 - self.cos_colatitude**2)

    @functools.cached_property
    def longitude(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.nlon) / self.nlon

    @functools.cached_property
    def pesos_latitude(self) -> np.ndarray:
        return self._nos_gauss[1]

    @functools.cached_property
    def pesos(self) -> np.ndarray:
        """Pesos w_ij para ∫_{S²} · dσ; somam 4π."""
        return np.outer(self.pesos_latitude, np.full(self.nlon, 2.0 * np.pi / self.nlon))

    @property
    def forma(self) -> Tuple[int, int]:
        return (self.nlat, self.nlon)

    @property
    def numero_coeficientes(self) -> int:
        return numero_coeficientes(self.lmax)

    def malha(self) -> Tuple[np.ndarray, np.ndarray]:
        """Colatitude e longitude em malha (nlat, nlon)."""
        return np.meshgrid(self.colatitude, self.longitude, indexing="ij")

    def integrar(self, valores: np.ndarray) -> np.ndarray:
        """Quadratura de ∫_{S²} f dσ sobre os dois últimos eixos."""
        return np.einsum("...ij,ij->...", valores, self.pesos)

    # --- Tabelas de Legendre normalizadas ---

    @functools.cached_property
    def _tabelas_legendre(self) -> Dict[str, np.ndarray]:
        """
        P̄_l^m, ∂λP̄_l^m e ∂²λP̄_l^m nos nós, indexados [m, l, i].

        A derivada usa (x² − 1) dP_l^m/dx = l x P_l^m − (l + m) P_{l−1}^m e a
        segunda derivada vem da equação associada de Legendre.
        """
        L = self.lmax + 1
        x = self.cos_colatitude
        s = self.sen_colatitude
        tabela = np.zeros((L, L, self.nlat))
        derivada = np.zeros_like(tabela)
        graus = np.arange(L)

        for m in range(L):
            ls = graus[m:]
            norma = np.sqrt((2 * ls + 1) / QUATRO_PI * np.exp(gammaln(ls - m + 1) - gammaln(ls + m + 1)))
            if m > 0:
                norma = norma * np.sqrt(2.0)
            bruto = lpmv(m, ls[:, None], x[None, :])
            anterior = np.zeros_like(bruto)
            if len(ls) > 1:
                anterior[1:] = lpmv(m, ls[1:, None] - 1, x[None, :])
            d_bruto = (ls[:, None] * x[None, :] * bruto - (ls[:, None] + m) * anterior) / s[None, :]
            tabela[m, m:] = norma[:, None] * bruto
            derivada[m, m:] = norma[:, None] * d_bruto

        ordens = graus[:, None, None].astype(float)
        lap = (graus * (graus + 1))[None, :, None].astype(float)
        segunda = -(x / s)[None, None, :] * derivada + (ordens**2 / s[None, None, :] ** 2 - lap) * tabela
        segunda[np.broadcast_to(graus[None, :, None] < graus[:, None, None], segunda.shape)] = 0.0

        for valor in (tabela, derivada, segunda):
            valor.setflags(write=False)
        logger.debug(f"Tabelas de Legendre calculadas para lmax={self.lmax}, nlat={self.nlat}.")
        return {"P": tabela, "dP": derivada, "d2P": segunda}

    def tabela(self, derivada_lambda: int = 0) -> np.ndarray:
        return self._tabelas_legendre[("P", "dP", "d2P")[derivada_lambda]]

    # --- Transformadas escalares (aceitam eixos iniciais extras) ---

    def _para_matrizes(self, coeficientes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        indice_cos, indice_sen, valido, valido_seno = _mapa_indices(self.lmax)
        cossenos = np.where(valido, coeficientes[..., indice_cos], 0.0)
        senos = np.where(valido_seno, coeficientes[..., indice_sen], 0.0)
        return cossenos, senos

    def _de_matrizes(self, cossenos: np.ndarray, senos: np.ndarray) -> np.ndarray:
        indice_cos, indice_sen, valido, valido_seno = _mapa_indices(self.lmax)
        saida = np.zeros(cossenos.shape[:-2] + (self.numero_coeficientes,))
        saida[..., indice_cos[valido]] = cossenos[..., valido]
        saida[..., indice_sen[valido_seno]] = senos[..., valido_seno]
        return saida

    def _ordens(self) -> np.ndarray:
        return np.arange(self.lmax + 1, dtype=float)[:, None]

    def sintetizar_valores(
        self, coeficientes: np.ndarray, derivada_lambda: int = 0, derivada_phi: int = 0
    ) -> np.ndarray:
        """
        Valores na grade de Σ a_k ∂λ^a ∂φ^b Y_k.

        Args:
            coeficientes: Array (..., (lmax+1)²).
            derivada_lambda: Ordem da derivada em colatitude (0, 1 ou 2).
            derivada_phi: Ordem da derivada em longitude (0, 1 ou 2).

        Returns:
            Array (..., nlat, nlon).
        """
        coeficientes = np.asarray(coeficientes, dtype=float)
        if coeficientes.shape[-1] != self.numero_coeficientes:
            raise ErroConfiguracao(
                f"Esperados {self.numero_coeficientes} coeficientes, recebidos {coeficientes.shape[-1]}."
            )
        cossenos, senos = self._para_matrizes(coeficientes)
        tabela = self.tabela(derivada_lambda)
        c = np.einsum("...ml,mli->...mi", cossenos, tabela)
        s = np.einsum("...ml,mli->...mi", senos, tabela)

        m = self._ordens()
        if derivada_phi == 1:
            c, s = m * s, -m * c
        elif derivada_phi == 2:
            c, s = -(m**2) * c, -(m**2) * s

        espectro = np.zeros(c.shape[:-2] + (self.nlat, self.nlon // 2 + 1), dtype=complex)
        modos = np.swapaxes(c - 1j * s, -1, -2) * (self.nlon / 2.0)
        espectro[..., : self.lmax + 1] = modos
        espectro[..., 0] = np.swapaxes(c, -1, -2)[..., 0] * self.nlon
        return np.fft.irfft(espectro, n=self.nlon, axis=-1)

    def _projecoes(self, valores: np.ndarray, derivada_lambda: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Projeções ponderadas [m, l] de f contra P̄ cos(mφ) e P̄ sen(mφ)."""
        valores = np.asarray(valores, dtype=float)
        if valores.shape[-2:] != self.forma:
            raise ErroConfiguracao(f"Forma {valores.shape[-2:]} incompatível com a grade {self.forma}.")
        espectro = np.fft.rfft(valores, axis=-1)[..., : self.lmax + 1]
        fator = 2.0 * np.pi / self.nlon
        ponderado = espectro * (fator * self.pesos_latitude)[:, None]
        tabela = self.tabela(derivada_lambda)
        cossenos = np.einsum("...im,mli->...ml", ponderado.real, tabela)
        senos = np.einsum("...im,mli->...ml", -ponderado.imag, tabela)
        return cossenos, senos

    def _derivar_phi_adjunto(self, cossenos: np.ndarray, senos: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(f, ∂φY) a partir das projeções (f, Y): cos <- −m·sen, sen <- m·cos."""
        m = self._ordens()
        return -m * senos, m * cossenos

    def analisar_valores(self, valores: np.ndarray) -> np.ndarray:
        """Coeficientes (f, Y_k) por quadratura; exato para f de banda limitada."""
        return self._de_matrizes(*self._projecoes(valores))

    # --- Transformadas vetoriais (potenciais de Hodge) ---

    def sintetizar_tangente(self, chi: np.ndarray, psi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Componentes (u_λ, u_φ) de grad′χ + curl′ψ."""
        s = self.sen_colatitude[:, None]
        u_lambda = self.sintetizar_valores(chi, 1, 0) + self.sintetizar_valores(psi, 0, 1) / s
        u_phi = self.sintetizar_valores(chi, 0, 1) / s - self.sintetizar_valores(psi, 1, 0)
        return u_lambda, u_phi

    def analisar_tangente(self, u_lambda: np.ndarray, u_phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Potenciais (χ, ψ) de um campo tangente.

        Usa (v, grad′Y) = l(l+1)χ e (v, curl′Y) = l(l+1)ψ, ambos exatos pela
        quadratura para campos de banda limitada.
        """
        s = self.sen_colatitude[:, None]
        c_l, s_l = self._projecoes(u_lambda, 1)
        c_p, s_p = self._derivar_phi_adjunto(*self._projecoes(np.asarray(u_phi) / s))
        gradiente = self._de_matrizes(c_l + c_p, s_l + s_p)

        c_l, s_l = self._derivar_phi_adjunto(*self._projecoes(np.asarray(u_lambda) / s))
        c_p, s_p = self._projecoes(u_phi, 1)
        rotacional = self._de_matrizes(c_l - c_p, s_l - s_p)

        inverso = _inverso_autovalores(self.lmax)
        return gradiente * inverso, rotacional * inverso

    def derivadas_tangente(self, chi: np.ndarray, psi: np.ndarray) -> Dict[str, np.ndarray]:
        """
        Componentes de grad′χ + curl′ψ e suas derivadas em λ e φ.

        Returns:
            Dicionário com 'u_lambda', 'u_phi', 'dl_u_lambda', 'dp_u_lambda',
            'dl_u_phi', 'dp_u_phi'.
        """
        s = self.sen_colatitude[:, None]
        c = self.cos_colatitude[:, None]
        sint = self.sintetizar_valores
        chi_l, chi_p = sint(chi, 1, 0), sint(chi, 0, 1)
        psi_l, psi_p = sint(psi, 1, 0), sint(psi, 0, 1)
        chi_lp, psi_lp = sint(chi, 1, 1), sint(psi, 1, 1)
        return {
            "u_lambda": chi_l + psi_p / s,
            "u_phi": chi_p / s - psi_l,
            "dl_u_lambda": sint(chi, 2, 0) + psi_lp / s - c * psi_p / s**2,
            "dp_u_lambda": chi_lp + sint(psi, 0, 2) / s,
            "dl_u_phi": chi_lp / s - c * chi_p / s**2 - sint(psi, 2, 0),
            "dp_u_phi": sint(chi, 0, 2) / s - psi_lp,
        }


@functools.lru_cache(maxsize=32)
def obter_grade(lmax: int, nlat: Optional[int] = None, nlon: Optional[int] = None) -> GradeEsfera:
    """Fábrica com cache: a mesma grade (e suas tabelas) é reutilizada."""
    return GradeEsfera.criar(lmax, nlat, nlon)


# --- Tipos de campo ---


def _congelar(instancia, nome: str, valor, forma: Tuple[int, ...]) -> None:
    array = np.array(valor, dtype=float)
    if array.shape != forma:
        raise ErroConfiguracao(f"'{nome}' com forma {array.shape}; esperado {forma}.")
    if not np.all(np.isfinite(array)):
        raise ErroConfiguracao(f"'{nome}' contém valores não finitos.")
    array.setflags(write=False)
    object.__setattr__(instancia, nome, array)


@dataclass(frozen=True, eq=False)
class EscalarEspectral:
    """Coeficientes a_{l,m} de um escalar na base real ortonormal."""

    grade: GradeEsfera
    coeficientes: np.ndarray

    def __post_init__(self):
        _congelar(self, "coeficientes", self.coeficientes, (self.grade.numero_coeficientes,))

    def sintetizar(self) -> "CampoEscalarEsfera":
        return sintetizar(self)


@dataclass(frozen=True, eq=False)
class CampoEscalarEsfera:
    """Escalar amostrado na grade (nlat, nlon)."""

    grade: GradeEsfera
    valores: np.ndarray

    def __post_init__(self):
        _congelar(self, "valores", self.valores, self.grade.forma)


@dataclass(frozen=True, eq=False)
class CampoTangenteEsfera:
    """Campo tangente (u_λ, u_φ) amostrado na grade; sem componente radial."""

    grade: GradeEsfera
    u_lambda: np.ndarray
    u_phi: np.ndarray

    def __post_init__(self):
        _congelar(self, "u_lambda", self.u_lambda, self.grade.forma)
        _congelar(self, "u_phi", self.u_phi, self.grade.forma)

    @classmethod
    def zero(cls, grade: GradeEsfera) -> "CampoTangenteEsfera":
        return cls(grade, np.zeros(grade.forma), np.zeros(grade.forma))

    @classmethod
    def de_potenciais(
        cls, grade: GradeEsfera, chi: Optional[np.ndarray] = None, psi: Optional[np.ndarray] = None
    ) -> "CampoTangenteEsfera":
        """Campo grad′χ + curl′ψ a partir dos coeficientes dos potenciais."""
        zeros = np.zeros(grade.numero_coeficientes)
        u_lambda, u_phi = grade.sintetizar_tangente(
            zeros if chi is None else chi, zeros if psi is None else psi
        )
        return cls(grade, u_lambda, u_phi)


@dataclass(frozen=True, eq=False)
class SolenoidalEspectral:
    """
    Campo de divergência nula u = curl′ψ pelos coeficientes da função corrente.

    O coeficiente l = 0 não representa campo algum (curl′ de constante é zero);
    os solucionadores o mantêm nulo e a norma DA_INV o recusa.
    """

    grade: GradeEsfera
    psi: np.ndarray

    def __post_init__(self):
        _congelar(self, "psi", self.psi, (self.grade.numero_coeficientes,))

    @classmethod
    def zero(cls, grade: GradeEsfera) -> "SolenoidalEspectral":
        return cls(grade, np.zeros(grade.numero_coeficientes))

    @classmethod
    def modo(cls, grade: GradeEsfera, l: int, m: int, amplitude: float = 1.0) -> "SolenoidalEspectral":
        """curl′(amplitude·Y_{l,m})."""
        psi = np.zeros(grade.numero_coeficientes)
        psi[indice_modo(l, m)] = amplitude
        return cls(grade, psi)

    @property
    def possui_modo_medio(self) -> bool:
        return self.psi[0] != 0.0

    def sem_modo_medio(self) -> "SolenoidalEspectral":
        psi = self.psi.copy()
        psi[0] = 0.0
        return SolenoidalEspectral(self.grade, psi)

    def sintetizar(self) -> CampoTangenteEsfera:
        return CampoTangenteEsfera.de_potenciais(self.grade, psi=self.psi)

    def vorticidade(self) -> np.ndarray:
        """Coeficientes de curl′u = l(l+1)ψ."""
        return autovalores_stokes(self.grade.lmax) * self.psi

    def aplicar_stokes(self) -> "SolenoidalEspectral":
        """A u: multiplica ψ_{l,m} por l(l+1)."""
        return SolenoidalEspectral(self.grade, self.vorticidade())


CampoEscalar = Union[CampoEscalarEsfera, EscalarEspectral]
CampoTangente = Union[CampoTangenteEsfera, SolenoidalEspectral]


def coeficientes_aleatorios(
    grade: GradeEsfera,
    rng: np.random.Generator,
    lmin: int = 0,
    lmax: Optional[int] = None,
    decaimento: float = 0.0,
) -> np.ndarray:
    """
    Coeficientes gaussianos com amplitude (1 + l)^(−decaimento) em lmin ≤ l ≤ lmax.

    Usado pelos testes e pela suíte de propriedades para gerar campos de
    banda limitada reprodutíveis.
    """
    lmax = grade.lmax if lmax is None else min(lmax, grade.lmax)
    graus, _ = graus_e_ordens(grade.lmax)
    ativos = (graus >= lmin) & (graus <= lmax)
    amplitude = np.where(ativos, (1.0 + graus) ** (-decaimento), 0.0)
    return amplitude * rng.standard_normal(grade.numero_coeficientes)


# --- Operações ---


def analisar(campo: CampoEscalarEsfera) -> EscalarEspectral:
    """
    Coeficientes espectrais de um escalar na grade.

    Examples:
        >>> grade = obter_grade(4)
        >>> um = CampoEscalarEsfera(grade, np.ones(grade.forma))
        >>> round(analisar(um).coeficientes[0] ** 2 / np.pi, 12)
        4.0
    """
    return EscalarEspectral(campo.grade, campo.grade.analisar_valores(campo.valores))


def sintetizar(espectral: EscalarEspectral) -> CampoEscalarEsfera:
    """Valores na grade de Σ a_{l,m} Y_{l,m}."""
    return CampoEscalarEsfera(espectral.grade, espectral.grade.sintetizar_valores(espectral.coeficientes))


class TipoOperador(str, Enum):
    GRADIENTE = "GRAD"
    DIVERGENCIA = "DIV"
    ROTACIONAL_CORRENTE = "CURL_CORRENTE_PARA_VETOR"
    ROTACIONAL_ESCALAR = "CURL_VETOR_PARA_ESCALAR"
    LAPLACE_BELTRAMI = "LAPLACE_BELTRAMI"
    LAPLACE_DE_RHAM = "LAPLACE_DE_RHAM"


def _coeficientes_escalar(entrada: CampoEscalar) -> Tuple[GradeEsfera, np.ndarray]:
    if isinstance(entrada, EscalarEspectral):
        return entrada.grade, entrada.coeficientes
    return entrada.grade, entrada.grade.analisar_valores(entrada.valores)


def decompor_hodge(v: CampoTangente) -> Tuple[EscalarEspectral, SolenoidalEspectral]:
    """
    Potenciais de Hodge de um campo tangente: v = grad′χ + curl′ψ.

    Returns:
        (χ, ψ) com os coeficientes l = 0 nulos.
    """
    if isinstance(v, SolenoidalEspectral):
        return EscalarEspectral(v.grade, np.zeros(v.grade.numero_coeficientes)), v.sem_modo_medio()
    chi, psi = v.grade.analisar_tangente(v.u_lambda, v.u_phi)
    return EscalarEspectral(v.grade, chi), SolenoidalEspectral(v.grade, psi)


def _gradiente(entrada: CampoEscalar) -> CampoTangenteEsfera:
    grade, coef = _coeficientes_escalar(entrada)
    return CampoTangenteEsfera.de_potenciais(grade, chi=coef)


def _rotacional_corrente(entrada: CampoEscalar) -> CampoTangenteEsfera:
    grade, coef = _coeficientes_escalar(entrada)
    return CampoTangenteEsfera.de_potenciais(grade, psi=coef)


def _laplace_beltrami(entrada: CampoEscalar) -> CampoEscalarEsfera:
    grade, coef = _coeficientes_escalar(entrada)
    return CampoEscalarEsfera(grade, grade.sintetizar_valores(-autovalores_stokes(grade.lmax) * coef))


def _divergencia(entrada: CampoTangente) -> CampoEscalarEsfera:
    chi, _ = decompor_hodge(entrada)
    grade = chi.grade
    return CampoEscalarEsfera(grade, grade.sintetizar_valores(-autovalores_stokes(grade.lmax) * chi.coeficientes))


def _rotacional_escalar(entrada: CampoTangente) -> CampoEscalarEsfera:
    _, psi = decompor_hodge(entrada)
    return CampoEscalarEsfera(psi.grade, psi.grade.sintetizar_valores(psi.vorticidade()))


def _laplace_de_rham(entrada: CampoTangente) -> CampoTangenteEsfera:
    chi, psi = decompor_hodge(entrada)
    grade = chi.grade
    autovalores = autovalores_stokes(grade.lmax)
    return CampoTangenteEsfera.de_potenciais(grade, chi=-autovalores * chi.coeficientes, psi=-autovalores * psi.psi)


_ESCALARES = (CampoEscalarEsfera, EscalarEspectral)
_TANGENTES = (CampoTangenteEsfera, SolenoidalEspectral)

# Mapeamento tipo de operador -> (tipos de entrada aceitos, implementação)
MAPEAMENTO_OPERADORES: Dict[TipoOperador, Tuple[tuple, Callable]] = {
    TipoOperador.GRADIENTE: (_ESCALARES, _gradiente),
    TipoOperador.ROTACIONAL_CORRENTE: (_ESCALARES, _rotacional_corrente),
    TipoOperador.LAPLACE_BELTRAMI: (_ESCALARES, _laplace_beltrami),
    TipoOperador.DIVERGENCIA: (_TANGENTES, _divergencia),
    TipoOperador.ROTACIONAL_ESCALAR: (_TANGENTES, _rotacional_escalar),
    TipoOperador.LAPLACE_DE_RHAM: (_TANGENTES, _laplace_de_rham),
}


def aplicar_operador(tipo: TipoOperador, entrada):
    """
    Aplica um operador diferencial tangencial de forma espectral exata.

    Args:
        tipo: Operador desejado.
        entrada: Escalar (grade ou espectral) para GRADIENTE, ROTACIONAL_CORRENTE e
            LAPLACE_BELTRAMI; campo tangente para os demais.

    Returns:
        CampoTangenteEsfera para GRADIENTE, ROTACIONAL_CORRENTE e LAPLACE_DE_RHAM;
        CampoEscalarEsfera para os demais.

    Raises:
        ErroUso: Se o tipo da entrada não corresponder ao operador.
    """
    tipo = TipoOperador(tipo)
    aceitos, funcao = MAPEAMENTO_OPERADORES[tipo]
    if not isinstance(entrada, aceitos):
        raise ErroUso(
            f"Operador {tipo.value} não aceita entrada do tipo {type(entrada).__name__}.",
            "TipoEntradaInvalido",
        )
    return funcao(entrada)


def projetar_leray(v: CampoTangenteEsfera) -> SolenoidalEspectral:
    """Projeção ortogonal de L²(S²) sobre o subespaço de divergência nula."""
    _, psi = decompor_hodge(v)
    return psi


# --- Produtos internos e normas ---


class TipoNorma(str, Enum):
    L2 = "L2_S2"
    SEMINORMA_V = "V_SEMINORM"
    DA_INV = "DA_INV"


def _verificar_grades(u, v) -> GradeEsfera:
    if u.grade != v.grade:
        raise ErroConfiguracao(f"Grades incompatíveis: {u.grade} e {v.grade}.")
    return u.grade


def produto_interno(u, v, tipo: TipoNorma = TipoNorma.L2) -> float:
    """
    Produto interno na esfera no sentido pedido.

    Para SolenoidalEspectral as fórmulas são espectrais (L² = Σ l(l+1)ψφ,
    V = Σ (l(l+1))²ψφ, DA_INV = Σ ψφ/(l(l+1))); para campos na grade usa-se a
    quadratura. Escalares aceitam apenas L².

    Raises:
        ErroUso: DA_INV fora de SolenoidalEspectral ou com modo l = 0 presente.
    """
    tipo = TipoNorma(tipo)
    grade = _verificar_grades(u, v)
    autovalores = autovalores_stokes(grade.lmax)

    if isinstance(u, SolenoidalEspectral) and isinstance(v, SolenoidalEspectral):
        if tipo is TipoNorma.L2:
            return float(np.dot(autovalores * u.psi, v.psi))
        if tipo is TipoNorma.SEMINORMA_V:
            return float(np.dot(autovalores**2 * u.psi, v.psi))
        if u.possui_modo_medio or v.possui_modo_medio:
            raise ErroUso("DA_INV indefinida para campo com componente l = 0.", "ModoMedioPresente")
        return float(np.dot(_inverso_autovalores(grade.lmax) * u.psi, v.psi))

    if tipo is TipoNorma.DA_INV:
        raise ErroUso("DA_INV exige campos na representação SolenoidalEspectral.", "TipoEntradaInvalido")

    if isinstance(u, _TANGENTES) and isinstance(v, _TANGENTES):
        if tipo is TipoNorma.SEMINORMA_V:
            return float(
                grade.integrar(
                    _rotacional_escalar(u).valores * _rotacional_escalar(v).valores
                )
            )
        u = u.sintetizar() if isinstance(u, SolenoidalEspectral) else u
        v = v.sintetizar() if isinstance(v, SolenoidalEspectral) else v
        return float(grade.integrar(u.u_lambda * v.u_lambda + u.u_phi * v.u_phi))

    if isinstance(u, _ESCALARES) and isinstance(v, _ESCALARES) and tipo is TipoNorma.L2:
        if isinstance(u, EscalarEspectral) and isinstance(v, EscalarEspectral):
            return float(np.dot(u.coeficientes, v.coeficientes))
        valores_u = u.valores if isinstance(u, CampoEscalarEsfera) else sintetizar(u).valores
        valores_v = v.valores if isinstance(v, CampoEscalarEsfera) else sintetizar(v).valores
        return float(grade.integrar(valores_u * valores_v))

    raise ErroUso(
        f"Combinação não suportada: {type(u).__name__}, {type(v).__name__}, {tipo.value}.",
        "TipoEntradaInvalido",
    )


def norma(u, tipo: TipoNorma = TipoNorma.L2) -> float:
    return float(np.sqrt(max(produto_interno(u, u, tipo), 0.0)))


def norma_sobolev(campo: Union[EscalarEspectral, SolenoidalEspectral], s: int) -> float:
    """
    ‖u‖_{H^s} com ‖u‖² + ‖(−Δ′)^{s/2}u‖², apenas para s inteiro não negativo.

    Para SolenoidalEspectral o laplaciano é o de Laplace–de Rham, cujo autovalor
    em curl′Y_{l,m} é −l(l+1).
    """
    if not isinstance(s, (int, np.integer)) or s < 0:
        raise ErroUso(f"Ordem de Sobolev deve ser inteira e não negativa (recebida {s}).")
    autovalores = autovalores_stokes(campo.grade.lmax)
    if isinstance(campo, EscalarEspectral):
        quadrados = campo.coeficientes**2
    elif isinstance(campo, SolenoidalEspectral):
        quadrados = autovalores * campo.psi**2
    else:
        raise ErroUso(f"norma_sobolev não aceita {type(campo).__name__}.")
    pesos = 1.0 + autovalores**s
    return float(np.sqrt(np.sum(pesos * quadrados)))
